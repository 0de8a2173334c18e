#include "expleval/reports.hpp"

#include <cstdio>
#include <sstream>

#include "expleval/errors.hpp"

namespace expleval {

ReportFormat parse_report_format(std::string_view s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "json") return ReportFormat::Json;
  throw ValidationError("unknown report format '" + std::string(s) + "' (expected text or json)");
}

std::string_view to_string(ReportKind k) {
  switch (k) {
    case ReportKind::Objective: return "objective";
    case ReportKind::Subjective: return "subjective";
    case ReportKind::Correlation: return "correlation";
    case ReportKind::Fuzzy: return "fuzzy";
    case ReportKind::Significance: return "significance";
  }
  return "?";
}

ReportKind parse_report_kind(std::string_view s) {
  for (auto k : {ReportKind::Objective, ReportKind::Subjective, ReportKind::Correlation, ReportKind::Fuzzy,
                 ReportKind::Significance}) {
    if (to_string(k) == s) return k;
  }
  throw NotFoundError("unknown report '" + std::string(s) + "'");
}

ReportKind report_kind_of_table(std::string_view table) {
  if (table == "3") return ReportKind::Objective;
  if (table == "4") return ReportKind::Subjective;
  if (table == "5") return ReportKind::Correlation;
  if (table == "6") return ReportKind::Fuzzy;
  if (table == "anova") return ReportKind::Significance;
  throw ValidationError("unknown table '" + std::string(table) + "' (expected 3, 4, 5, 6 or anova)");
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

constexpr std::size_t kStyleWidth = 15;

std::string style_cell(ExplanationStyle s) { return pad_right(std::string(display_name(s)), kStyleWidth); }

}  // namespace

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

Json objective_json(const ObjectiveReport& r) {
  Json rows = Json::array();
  for (auto s : kAllStyles) {
    const auto& row = r.rows[index_of(s)];
    Json j{{"style", to_string(s)}};
    if (row) {
      j["mean_time_s"] = row->mean_time_s;
      j["mean_diff"] = row->mean_diff;
      j["mean_abs_diff"] = row->mean_abs_diff;
      j["persuasiveness"] = persuasiveness_label(row->mean_diff);
      j["n_trials"] = row->n_trials;
    } else {
      j["absent"] = true;
    }
    rows.push_back(std::move(j));
  }
  return Json{{"table", 3}, {"report", "objective"}, {"rows", std::move(rows)}};
}

std::string objective_text(const ObjectiveReport& r) {
  std::ostringstream out;
  out << "Table 3: Efficiency, effectiveness and persuasiveness of explanation styles (means)\n";
  out << pad_right("Style", kStyleWidth) << pad_left("Time (s)", 10) << pad_left("r - r'", 10)
      << pad_left("|r - r'|", 10) << "  " << pad_right("Persuasiveness", 15) << pad_left("Trials", 7) << '\n';
  for (auto s : kAllStyles) {
    const auto& row = r.rows[index_of(s)];
    out << style_cell(s);
    if (!row) {
      out << pad_left("n/a", 10) << pad_left("n/a", 10) << pad_left("n/a", 10) << "  " << pad_right("n/a", 15)
          << pad_left("0", 7) << '\n';
      continue;
    }
    out << pad_left(fmt("%.2f", row->mean_time_s), 10) << pad_left(fmt("%.2f", row->mean_diff), 10)
        << pad_left(fmt("%.2f", row->mean_abs_diff), 10) << "  "
        << pad_right(std::string(persuasiveness_label(row->mean_diff)), 15)
        << pad_left(std::to_string(row->n_trials), 7) << '\n';
  }
  out << "|r - r'| is a supplementary effectiveness figure; r - r' > 0 means positive persuasiveness.\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Subjective
// ---------------------------------------------------------------------------

Json subjective_json(const SubjectiveReport& r) {
  Json rows = Json::array();
  for (auto s : kAllStyles) {
    Json cells = Json::object();
    for (auto m : kAllMetrics) {
      const auto& c = r.cells[index_of(s)][index_of(m)];
      cells[std::string(to_string(m))] = c ? Json{{"mean", c->mean}, {"n", c->n}} : Json(nullptr);
    }
    rows.push_back(Json{{"style", to_string(s)}, {"cells", std::move(cells)}});
  }
  return Json{{"table", 4}, {"report", "subjective"}, {"rows", std::move(rows)}};
}

std::string subjective_text(const SubjectiveReport& r) {
  std::ostringstream out;
  out << "Table 4: Subjective evaluation of explanation styles (mean Likert score, 1-5)\n";
  out << pad_right("Style", kStyleWidth);
  for (auto m : kAllMetrics) out << pad_left(std::string(to_string(m)), 16);
  out << pad_left("n", 7) << '\n';
  for (auto s : kAllStyles) {
    out << style_cell(s);
    std::size_t n = 0;
    for (auto m : kAllMetrics) {
      const auto& c = r.cells[index_of(s)][index_of(m)];
      out << pad_left(c ? fmt("%.2f", c->mean) : "n/a", 16);
      if (c) n = std::max(n, c->n);
    }
    out << pad_left(std::to_string(n), 7) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Correlation
// ---------------------------------------------------------------------------

Json correlation_json(const CorrelationMatrix& m) {
  Json cells = Json::array();
  for (const auto& row : m.cells) {
    Json jr = Json::array();
    for (const auto& c : row) {
      jr.push_back(c ? Json{{"rho", c->rho}, {"p_value", c->p_value}, {"stars", significance_stars(c->p_value)}}
                     : Json(nullptr));
    }
    cells.push_back(std::move(jr));
  }
  return Json{{"table", 5},         {"report", "correlation"}, {"style", to_string(m.style)},
              {"n", m.n},           {"variables", m.variables}, {"cells", std::move(cells)}};
}

std::string correlation_text(const CorrelationMatrix& m) {
  std::ostringstream out;
  out << "Table 5: Spearman rank correlation of metrics, " << display_name(m.style) << " explanations (n = " << m.n
      << ")\n";
  std::size_t width = 10;
  for (const auto& v : m.variables) width = std::max(width, v.size() + 2);
  out << pad_right("", width);
  for (const auto& v : m.variables) out << pad_left(v, width);
  out << '\n';
  for (std::size_t a = 0; a < m.variables.size(); ++a) {
    out << pad_right(m.variables[a], width);
    for (std::size_t b = 0; b < m.variables.size(); ++b) {
      const auto& c = m.cells[a][b];
      std::string cell = c ? fmt("%.2f", c->rho) + significance_stars(c->p_value) : "n/a";
      if (cell == "-0.00") cell = "0.00";
      out << pad_left(pad_right(cell, 8), width);
    }
    out << '\n';
  }
  out << "* p < 0.05, ** p < 0.01, *** p < 0.001\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Fuzzy
// ---------------------------------------------------------------------------

std::vector<StyleEvaluation> evaluate_all_styles(std::span<const Session> sessions, const WeightVector& w) {
  std::vector<StyleEvaluation> out;
  for (auto s : kAllStyles) {
    const bool answered = std::any_of(sessions.begin(), sessions.end(), [&](const Session& session) {
      return std::any_of(session.likert.begin(), session.likert.end(),
                         [&](const LikertResponse& l) { return l.style == s; });
    });
    if (answered) out.push_back(evaluate_style(sessions, s, w));
  }
  return out;
}

Json fuzzy_json(const std::vector<StyleEvaluation>& rows, const WeightVector& w) {
  Json weights = Json::object();
  for (auto m : kAllMetrics) weights[std::string(to_string(m))] = w.weights.at(index_of(m));
  Json jrows = Json::array();
  for (const auto& r : rows) {
    Json matrix = Json::object();
    for (auto m : kAllMetrics) matrix[std::string(to_string(m))] = r.r.rows[index_of(m)];
    jrows.push_back(Json{{"style", to_string(r.style)},
                         {"e", r.e.e},
                         {"grade", display_name(r.classification.grade)},
                         {"membership", r.classification.membership},
                         {"tie", r.classification.tie},
                         {"implied_mean", implied_mean(r.e)},
                         {"r", std::move(matrix)}});
  }
  return Json{{"table", 6},
              {"report", "fuzzy"},
              {"composition", SumComposition{}.name()},
              {"weights", std::move(weights)},
              {"grades", [] {
                 Json g = Json::array();
                 for (auto grade : kAllGrades) g.push_back(display_name(grade));
                 return g;
               }()},
              {"rows", std::move(jrows)}};
}

std::string fuzzy_text(const std::vector<StyleEvaluation>& rows, const WeightVector& w) {
  std::ostringstream out;
  out << "Table 6: Overall evaluation of explanation styles (sum composition; weights";
  for (auto m : kAllMetrics) out << ' ' << to_string(m) << '=' << fmt("%.4f", w.weights.at(index_of(m)));
  out << ")\n";
  out << pad_right("Style", kStyleWidth);
  for (auto g : kAllGrades) out << pad_left(std::string(display_name(g)), 11);
  out << pad_left("Sum", 9) << pad_left("Mean", 8) << "  Grade\n";
  for (const auto& r : rows) {
    out << style_cell(r.style);
    for (std::size_t j = 0; j < r.e.e.size(); ++j) {
      const bool is_max = r.e.e[j] == r.classification.membership;
      const std::string v = fmt("%.4f", r.e.e[j]);
      out << pad_left(is_max ? "[" + v + "]" : v + " ", 11);
    }
    out << pad_left(fmt("%.4f", r.e.sum()), 9) << pad_left(fmt("%.2f", implied_mean(r.e)), 8) << "  "
        << display_name(r.classification.grade) << (r.classification.tie ? " (tie)" : "") << '\n';
  }
  out << "[x] marks the largest membership of each style; ties resolve to the higher grade.\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Significance
// ---------------------------------------------------------------------------

Json significance_json(const std::vector<SignificanceTest>& tests) {
  Json out = Json::array();
  for (const auto& t : tests) {
    Json j{{"measure", t.measure}, {"granularity", to_string(t.granularity)}};
    Json styles = Json::array();
    for (auto s : t.styles) styles.push_back(to_string(s));
    j["styles"] = std::move(styles);
    if (t.anova) {
      j["anova"] = Json{{"f", std::isinf(t.anova->f) ? Json("inf") : Json(t.anova->f)},
                        {"p_value", t.anova->p_value},
                        {"df_between", t.anova->df_between},
                        {"df_within", t.anova->df_within}};
    } else {
      j["anova"] = nullptr;
    }
    Json pairs = Json::array();
    for (const auto& p : t.tukey) {
      pairs.push_back(Json{{"a", to_string(kAllStyles[p.i])},
                           {"b", to_string(kAllStyles[p.j])},
                           {"mean_diff", p.mean_diff},
                           {"q", std::isinf(p.q) ? Json("inf") : Json(p.q)},
                           {"p_value", p.p_value},
                           {"significant", p.significant}});
    }
    j["tukey"] = std::move(pairs);
    out.push_back(std::move(j));
  }
  return Json{{"report", "significance"}, {"tests", std::move(out)}};
}

std::string significance_text(const std::vector<SignificanceTest>& tests) {
  std::ostringstream out;
  out << "One-way ANOVA across explanation styles with Tukey HSD (alpha 0.05)\n";
  for (const auto& t : tests) {
    out << '\n' << t.measure << " (" << to_string(t.granularity) << "): ";
    if (!t.anova) {
      out << "not enough observations\n";
      continue;
    }
    out << "F(" << fmt("%.0f", t.anova->df_between) << ", " << fmt("%.0f", t.anova->df_within) << ") = "
        << (std::isinf(t.anova->f) ? std::string("inf") : fmt("%.4f", t.anova->f)) << ", p = "
        << fmt("%.4f", t.anova->p_value) << '\n';
    for (const auto& p : t.tukey) {
      if (!p.significant) continue;
      out << "  " << pad_right(std::string(display_name(kAllStyles[p.i])) + " vs " +
                                   std::string(display_name(kAllStyles[p.j])),
                               32)
          << " diff " << pad_left(fmt("%.3f", p.mean_diff), 8) << "  p " << fmt("%.4f", p.p_value) << '\n';
    }
    const auto n_sig = std::count_if(t.tukey.begin(), t.tukey.end(), [](const TukeyPair& p) { return p.significant; });
    out << "  " << n_sig << " of " << t.tukey.size() << " pairs significant\n";
  }
  return out.str();
}

std::string render_report(ReportKind kind, std::span<const Session> sessions, const ReportOptions& opts) {
  if (sessions.empty()) throw InsufficientDataError("no complete sessions");
  const bool json = opts.format == ReportFormat::Json;
  auto dump = [](const Json& j) { return j.dump(2) + "\n"; };
  switch (kind) {
    case ReportKind::Objective: {
      const auto r = objective_report(sessions);
      return json ? dump(objective_json(r)) : objective_text(r);
    }
    case ReportKind::Subjective: {
      const auto r = subjective_report(sessions);
      return json ? dump(subjective_json(r)) : subjective_text(r);
    }
    case ReportKind::Correlation: {
      const auto m = correlation_matrix(sessions, opts.correlation_style, opts.correlation_objective);
      return json ? dump(correlation_json(m)) : correlation_text(m);
    }
    case ReportKind::Fuzzy: {
      const auto rows = evaluate_all_styles(sessions, opts.weights);
      return json ? dump(fuzzy_json(rows, opts.weights)) : fuzzy_text(rows, opts.weights);
    }
    case ReportKind::Significance: {
      const auto tests = significance_tests(sessions, opts.alpha);
      return json ? dump(significance_json(tests)) : significance_text(tests);
    }
  }
  throw ValidationError("unknown report kind");
}

}  // namespace expleval
