#include "expleval/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "expleval/errors.hpp"

namespace expleval {

int ScoreDistribution::sample(Rng& rng) const {
  double total = 0.0;
  for (const auto& [v, w] : weights) total += w;
  double x = rng.uniform01() * total;
  for (const auto& [v, w] : weights) {
    if (x < w) return v;
    x -= w;
  }
  for (auto it = weights.rbegin(); it != weights.rend(); ++it) {
    if (it->second > 0.0) return it->first;
  }
  throw ValidationError("empty score distribution");
}

int ScoreDistribution::sample_within(Rng& rng, int lo, int hi) const {
  ScoreDistribution restricted;
  for (const auto& [v, w] : weights) {
    if (v >= lo && v <= hi && w > 0.0) restricted.weights[v] = w;
  }
  if (restricted.weights.empty()) return lo + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(hi - lo + 1)));
  return restricted.sample(rng);
}

void ScoreDistribution::validate(int lo, int hi, const std::string& what) const {
  double total = 0.0;
  for (const auto& [v, w] : weights) {
    if (v < lo || v > hi) throw ValidationError(what + ": value " + std::to_string(v) + " out of range");
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError(what + ": weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError(what + ": distribution has no mass");
}

namespace {

template <typename T>
const T& lookup(const std::map<std::string, T>& m, std::string_view key, const std::string& what) {
  if (auto it = m.find(std::string(key)); it != m.end()) return it->second;
  if (auto it = m.find("*"); it != m.end()) return it->second;
  throw ValidationError("profile has no " + what + " entry for " + std::string(key));
}

ScoreDistribution distribution_from_json(const Json& j, const std::string& what) {
  if (!j.is_object()) throw ValidationError(what + " must be an object of value -> weight");
  ScoreDistribution d;
  for (const auto& [k, v] : j.items()) {
    int value = 0;
    try {
      std::size_t used = 0;
      value = std::stoi(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::logic_error&) {
      throw ValidationError(what + ": key '" + k + "' is not an integer");
    }
    if (!v.is_number()) throw ValidationError(what + ": weight for " + k + " is not a number");
    d.weights[value] = v.get<double>();
  }
  return d;
}

void check_keys(const Json& j, bool metrics) {
  for (const auto& [k, v] : j.items()) {
    if (k == "*") continue;
    if (metrics) parse_metric(k);
    else parse_style(k);
  }
}

}  // namespace

const ScoreDistribution& SimulationProfile::r_for(ExplanationStyle s) const { return lookup(r, to_string(s), "r"); }
const ScoreDistribution& SimulationProfile::diff_for(ExplanationStyle s) const {
  return lookup(diff, to_string(s), "diff");
}
const TimeDistribution& SimulationProfile::time_for(ExplanationStyle s) const {
  return lookup(time_ms, to_string(s), "time_ms");
}
const ScoreDistribution& SimulationProfile::likert_for(ExplanationStyle s, MetricId m) const {
  const std::string style(to_string(s)), metric(to_string(m));
  for (const auto& key : {style, std::string("*")}) {
    auto it = likert.find(key);
    if (it == likert.end()) continue;
    if (auto mt = it->second.find(metric); mt != it->second.end()) return mt->second;
    if (auto mt = it->second.find("*"); mt != it->second.end()) return mt->second;
  }
  throw ValidationError("profile has no likert entry for " + style + "/" + metric);
}

void SimulationProfile::validate() const {
  seed_score.validate(1, 5, "seed_score");
  for (auto s : kAllStyles) {
    const std::string name(to_string(s));
    r_for(s).validate(1, 5, "r[" + name + "]");
    diff_for(s).validate(-4, 4, "diff[" + name + "]");
    const auto& t = time_for(s);
    if (!(t.mean_ms >= 0.0) || !(t.sd_ms >= 0.0) || t.mean_ms > static_cast<double>(kMaxDecisionMs)) {
      throw ValidationError("time_ms[" + name + "] needs 0 <= mean <= cap and sd >= 0");
    }
    for (auto m : kAllMetrics) likert_for(s, m).validate(1, 5, "likert[" + name + "][" + std::string(to_string(m)) + "]");
  }
}

SimulationProfile profile_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("profile must be a JSON object");
  SimulationProfile p;
  p.seed_score = j.contains("seed_score") ? distribution_from_json(j.at("seed_score"), "seed_score")
                                          : ScoreDistribution{{{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}};
  if (j.contains("r")) {
    check_keys(j.at("r"), false);
    for (const auto& [k, v] : j.at("r").items()) p.r[k] = distribution_from_json(v, "r[" + k + "]");
  } else {
    p.r["*"] = ScoreDistribution{{{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}};
  }
  if (!j.contains("diff") || !j.contains("time_ms") || !j.contains("likert")) {
    throw ValidationError("profile needs diff, time_ms and likert sections");
  }
  check_keys(j.at("diff"), false);
  for (const auto& [k, v] : j.at("diff").items()) p.diff[k] = distribution_from_json(v, "diff[" + k + "]");
  check_keys(j.at("time_ms"), false);
  for (const auto& [k, v] : j.at("time_ms").items()) {
    if (!v.is_object() || !v.contains("mean")) throw ValidationError("time_ms[" + k + "] needs a mean");
    p.time_ms[k] = TimeDistribution{v.at("mean").get<double>(), v.value("sd", 0.0)};
  }
  check_keys(j.at("likert"), false);
  for (const auto& [style, metrics] : j.at("likert").items()) {
    check_keys(metrics, true);
    for (const auto& [metric, dist] : metrics.items()) {
      p.likert[style][metric] = distribution_from_json(dist, "likert[" + style + "][" + metric + "]");
    }
  }
  p.validate();
  return p;
}

SimulationProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("profile " + path.string() + " is not valid JSON: " + e.what());
  }
  return profile_from_json(j);
}

namespace {

const std::vector<std::string> kAgeBands = {"18-24", "25-34", "35-44", "45-54", "55+"};
const std::vector<std::string> kGenders = {"female", "male", "other"};
const std::vector<std::string> kEducation = {"secondary", "bachelor", "master", "doctorate"};
const std::vector<std::string> kOccupation = {"student", "employed", "self-employed", "other"};
const std::vector<std::string> kFrequency = {"weekly", "monthly", "rarely"};

const std::string& pick(Rng& rng, const std::vector<std::string>& v) { return v[rng.uniform_index(v.size())]; }

}  // namespace

std::vector<EventRecord> simulate(const StudyContext& ctx, const SimulationProfile& profile,
                                  const SimulationOptions& opts) {
  profile.validate();
  std::vector<EventRecord> log;
  std::int64_t clock = opts.ts_base_ms;
  for (std::size_t i = 0; i < opts.n_sessions; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "sim-%05zu", i + 1);
    Rng rng(derive_seed(opts.seed, "answers:" + std::string(id)));
    std::uint64_t seq = 0;
    auto record = [&](const Transition& t) {
      log.push_back(EventRecord{++seq, t.type, id, t.payload, clock, std::nullopt});
      clock += 1000;
      return t.session;
    };

    Demographics d{pick(rng, kAgeBands), pick(rng, kGenders), pick(rng, kEducation), pick(rng, kOccupation),
                   pick(rng, kFrequency)};
    Session s = record(create_session(ctx.dataset, id, std::move(d), derive_seed(opts.seed, i)));
    for (std::size_t k = 0; k < kSeedTaskCount; ++k) {
      s = record(seed_rating(s, k, profile.seed_score.sample(rng), ctx));
    }
    for (std::size_t k = 0; k < s.trials.size(); ++k) {
      const auto style = s.trials[k].style;
      const int diff = profile.diff_for(style).sample(rng);
      const int r = profile.r_for(style).sample_within(rng, std::max(1, 1 + diff), std::min(5, 5 + diff));
      const auto& time = profile.time_for(style);
      const double t = time.mean_ms + time.sd_ms * rng.normal();
      const auto t_ms = std::clamp<std::int64_t>(std::llround(t), 0, kMaxDecisionMs);
      s = record(explanation_rating(s, k, r, t_ms));
      s = record(detail_rating(s, k, r - diff));
    }
    for (auto style : kAllStyles) {
      for (auto metric : kAllMetrics) {
        s = record(likert_response(s, style, metric, profile.likert_for(style, metric).sample(rng)));
      }
    }
  }
  return log;
}

}  // namespace expleval
