#include "spco/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace spco {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, Policy>& policy_names() {
  static const std::map<std::string, Policy> names = {
      {"spcoae", Policy::spcoae},           {"spcoae_cost", Policy::spcoae_cost},
      {"random", Policy::random},           {"travel_cost", Policy::travel_cost},
      {"ig_min", Policy::ig_min},           {"entropy", Policy::entropy}};
  return names;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts, out;
  boost::split(parts, s, boost::is_any_of(", "), boost::token_compress_on);
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

// "1-10" or "1,4,7".
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(s)) {
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw ConfigError("descending seed range: " + item);
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed list entry: " + item);
    }
  }
  return out;
}

bool parse_bool(const std::string& v) {
  const std::string s = boost::to_lower_copy(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

template <typename T>
void read(const pt::ptree& tree, const std::string& key, T& out) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return;
  std::istringstream in(boost::trim_copy(*v));
  T parsed{};
  if (!(in >> parsed) || !in.eof()) throw ConfigError("bad value for " + key + ": '" + *v + "'");
  out = parsed;
}

void check_known(const pt::ptree& tree, const std::map<std::string, std::vector<std::string>>& known) {
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body)
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
}

}  // namespace

Policy parse_policy(const std::string& name) {
  const auto it = policy_names().find(name);
  if (it == policy_names().end()) throw ConfigError("unknown policy '" + name + "'");
  return it->second;
}

std::string policy_name(Policy p) {
  for (const auto& [name, value] : policy_names())
    if (value == p) return name;
  return "unknown";
}

Hyperparameters preset_hyperparameters(const std::string& name) {
  if (name == "exp1") return Hyperparameters::experiment1();
  if (name == "exp2") return Hyperparameters::experiment2();
  // Particle / pseudo-observation sweep on top of the simulated-home setting.
  static const std::map<std::string, std::pair<int, int>> patterns = {
      {"A", {1000, 1}}, {"B", {100, 1}}, {"C", {10, 1}},  {"D", {1, 1}},
      {"E", {1000, 10}}, {"F", {100, 10}}, {"G", {10, 10}}, {"H", {1, 10}},
      {"K", {1500, 10}}, {"L", {500, 10}}};
  const auto it = patterns.find(name);
  if (it == patterns.end()) throw ConfigError("unknown preset '" + name + "'");
  Hyperparameters h = Hyperparameters::experiment1();
  h.R = it->second.first;
  h.J = it->second.second;
  return h;
}

Config Config::parse(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_known(tree, {
      {"model", {"preset", "alpha", "beta", "gamma", "m0_x", "m0_y", "kappa0", "v0_xx", "v0_xy",
                 "v0_yy", "nu0", "L", "K", "R", "J", "eta"}},
      {"env", {"map", "meta", "annotation", "synth", "rooms", "room_min", "room_max",
               "resolution", "wall", "door", "extra_doors", "synth_seed", "spacing",
               "clearance"}},
      {"policy", {"name", "revisit", "stop_on_convergence", "ig_threshold", "ig_patience", "ig_form"}},
      {"run", {"seed", "steps", "threads", "answer_mode", "vocabulary", "start_candidate"}},
      {"suite", {"policies", "seeds", "env_seeds", "workers"}},
  });

  Config c;
  if (const auto preset = tree.get_optional<std::string>("model.preset"))
    c.model = preset_hyperparameters(boost::trim_copy(*preset));
  auto& h = c.model;
  read(tree, "model.alpha", h.alpha);
  read(tree, "model.beta", h.beta);
  read(tree, "model.gamma", h.gamma);
  read(tree, "model.m0_x", h.m0.x());
  read(tree, "model.m0_y", h.m0.y());
  read(tree, "model.kappa0", h.kappa0);
  read(tree, "model.v0_xx", h.V0(0, 0));
  read(tree, "model.v0_yy", h.V0(1, 1));
  if (tree.get_optional<std::string>("model.v0_xy")) {
    read(tree, "model.v0_xy", h.V0(0, 1));
    h.V0(1, 0) = h.V0(0, 1);
  }
  read(tree, "model.nu0", h.nu0);
  read(tree, "model.L", h.L);
  read(tree, "model.K", h.K);
  read(tree, "model.R", h.R);
  read(tree, "model.J", h.J);
  read(tree, "model.eta", h.eta);
  h.validate();

  auto& e = c.env;
  if (const auto v = tree.get_optional<std::string>("env.map")) e.map_path = resolve(*v, base_dir);
  if (const auto v = tree.get_optional<std::string>("env.meta")) e.meta_path = resolve(*v, base_dir);
  if (const auto v = tree.get_optional<std::string>("env.annotation"))
    e.annotation_path = resolve(*v, base_dir);
  e.synth = e.map_path.empty();
  if (const auto v = tree.get_optional<std::string>("env.synth")) e.synth = parse_bool(*v);
  if (!e.synth && (e.map_path.empty() || e.meta_path.empty()))
    throw ConfigError("[env] needs map and meta paths unless synth = true");
  read(tree, "env.rooms", e.synth_spec.rooms);
  read(tree, "env.room_min", e.synth_spec.room_min);
  read(tree, "env.room_max", e.synth_spec.room_max);
  read(tree, "env.resolution", e.synth_spec.resolution);
  read(tree, "env.wall", e.synth_spec.wall);
  read(tree, "env.door", e.synth_spec.door);
  read(tree, "env.extra_doors", e.synth_spec.extra_doors);
  read(tree, "env.synth_seed", e.synth_seed);
  read(tree, "env.spacing", e.spacing);
  read(tree, "env.clearance", e.clearance);
  if (!(e.spacing > 0) || e.clearance < 0) throw ConfigError("bad candidate spacing/clearance");

  auto& p = c.policy;
  if (const auto v = tree.get_optional<std::string>("policy.name"))
    p.policy = parse_policy(boost::trim_copy(*v));
  if (const auto v = tree.get_optional<std::string>("policy.revisit")) p.revisit = parse_bool(*v);
  if (const auto v = tree.get_optional<std::string>("policy.stop_on_convergence"))
    p.stop_on_convergence = parse_bool(*v);
  read(tree, "policy.ig_threshold", p.ig_threshold);
  read(tree, "policy.ig_patience", p.ig_patience);
  if (const auto v = tree.get_optional<std::string>("policy.ig_form")) {
    const auto f = boost::trim_copy(*v);
    if (f == "joint")
      p.ig_form = IGForm::joint;
    else if (f == "word_given_position")
      p.ig_form = IGForm::word_given_position;
    else
      throw ConfigError("ig_form must be joint or word_given_position");
  }
  if (p.ig_patience < 1) throw ConfigError("ig_patience must be >= 1");

  auto& r = c.run;
  read(tree, "run.seed", r.seed);
  read(tree, "run.steps", r.steps);
  read(tree, "run.threads", r.threads);
  read(tree, "run.start_candidate", r.start_candidate);
  if (const auto v = tree.get_optional<std::string>("run.answer_mode")) {
    const auto m = boost::trim_copy(*v);
    if (m == "single_word")
      r.answer_mode = AnswerMode::single_word;
    else if (m == "sentence")
      r.answer_mode = AnswerMode::sentence;
    else
      throw ConfigError("answer_mode must be single_word or sentence");
  }
  if (const auto v = tree.get_optional<std::string>("run.vocabulary")) {
    const auto m = boost::trim_copy(*v);
    if (m != "frozen" && m != "growth") throw ConfigError("vocabulary must be frozen or growth");
    r.grow_vocabulary = m == "growth";
  }
  if (r.steps < -1 || r.threads < 1 || r.start_candidate < 0)
    throw ConfigError("steps >= -1, threads >= 1, start_candidate >= 0 required");

  auto& s = c.suite;
  if (const auto v = tree.get_optional<std::string>("suite.policies"))
    for (const auto& name : split_list(*v)) s.policies.push_back(parse_policy(name));
  if (const auto v = tree.get_optional<std::string>("suite.seeds")) s.seeds = parse_seeds(*v);
  if (const auto v = tree.get_optional<std::string>("suite.env_seeds")) s.env_seeds = parse_seeds(*v);
  read(tree, "suite.workers", s.workers);
  if (s.workers < 1) throw ConfigError("workers must be >= 1");
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string Config::to_ini() const {
  std::ostringstream o;
  const auto& h = model;
  o << "[model]\n"
    << "alpha = " << num(h.alpha) << "\nbeta = " << num(h.beta) << "\ngamma = " << num(h.gamma)
    << "\nm0_x = " << num(h.m0.x()) << "\nm0_y = " << num(h.m0.y())
    << "\nkappa0 = " << num(h.kappa0) << "\nv0_xx = " << num(h.V0(0, 0))
    << "\nv0_xy = " << num(h.V0(0, 1)) << "\nv0_yy = " << num(h.V0(1, 1))
    << "\nnu0 = " << num(h.nu0) << "\nL = " << h.L << "\nK = " << h.K << "\nR = " << h.R
    << "\nJ = " << h.J << "\neta = " << num(h.eta) << "\n\n";
  o << "[env]\n";
  if (env.synth) {
    const auto& sp = env.synth_spec;
    o << "synth = true\nrooms = " << sp.rooms << "\nroom_min = " << num(sp.room_min)
      << "\nroom_max = " << num(sp.room_max) << "\nresolution = " << num(sp.resolution)
      << "\nwall = " << num(sp.wall) << "\ndoor = " << num(sp.door)
      << "\nextra_doors = " << sp.extra_doors << "\nsynth_seed = " << env.synth_seed << "\n";
  } else {
    o << "synth = false\nmap = " << env.map_path << "\nmeta = " << env.meta_path << "\n";
    if (!env.annotation_path.empty()) o << "annotation = " << env.annotation_path << "\n";
  }
  o << "spacing = " << num(env.spacing) << "\nclearance = " << num(env.clearance) << "\n\n";
  o << "[policy]\nname = " << policy_name(policy.policy)
    << "\nrevisit = " << (policy.revisit ? "true" : "false")
    << "\nstop_on_convergence = " << (policy.stop_on_convergence ? "true" : "false")
    << "\nig_threshold = " << num(policy.ig_threshold) << "\nig_patience = " << policy.ig_patience
    << "\nig_form = " << (policy.ig_form == IGForm::joint ? "joint" : "word_given_position")
    << "\n\n";
  o << "[run]\nseed = " << run.seed << "\nsteps = " << run.steps << "\nthreads = " << run.threads
    << "\nanswer_mode = " << (run.answer_mode == AnswerMode::sentence ? "sentence" : "single_word")
    << "\nvocabulary = " << (run.grow_vocabulary ? "growth" : "frozen")
    << "\nstart_candidate = " << run.start_candidate << "\n";
  if (!suite.policies.empty() || !suite.seeds.empty() || !suite.env_seeds.empty()) {
    o << "\n[suite]\n";
    if (!suite.policies.empty()) {
      o << "policies = ";
      for (std::size_t i = 0; i < suite.policies.size(); ++i)
        o << (i ? "," : "") << policy_name(suite.policies[i]);
      o << "\n";
    }
    auto list = [&](const char* key, const std::vector<std::uint64_t>& v) {
      if (v.empty()) return;
      o << key << " = ";
      for (std::size_t i = 0; i < v.size(); ++i) o << (i ? "," : "") << v[i];
      o << "\n";
    };
    list("seeds", suite.seeds);
    list("env_seeds", suite.env_seeds);
    o << "workers = " << suite.workers << "\n";
  }
  return o.str();
}

}  // namespace spco
