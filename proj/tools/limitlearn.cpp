// limitlearn: command-line driver.
//
// Exit codes: 0 the run is consistent with the expected outcome, 1 a property
// was violated, 2 parse or configuration error, 3 representation error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "limitlearn/limitlearn.hpp"

using namespace limitlearn;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kViolation = 1, kParse = 2, kRepresentation = 3;

struct RunConfig {
  std::string family_path;
  std::string learner = "Mstar";
  std::string target = "0";
  std::uint64_t seed = 0;
  std::size_t seeds = 1;
  std::size_t horizon = 10000;
  std::size_t window = 200;
  std::size_t depth = 50;
  std::size_t width = 4;
  std::size_t rounds = 30;
  std::uint64_t bound = 64;
  std::uint64_t e = 2;
  std::string out;
  std::string in;
  std::size_t jobs = 1;
  std::string kind = "limit";
  std::string mode = "closure";
};

/// Runs judged by convergence need horizon >= window >= 1.
void validate(const RunConfig& c) {
  if (c.window < 1 || c.horizon < c.window)
    throw PreconditionError("need horizon >= window >= 1 (horizon " + std::to_string(c.horizon) + ", window " +
                            std::to_string(c.window) + ")");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  std::ofstream os(fs::path(dir) / name, std::ios::binary);
  if (!os) throw ParseError("cannot write " + (fs::path(dir) / name).string());
  os << text;
}

void emit(const RunConfig& c, const std::string& name, const json& j) {
  const std::string s = dump(j);
  std::cout << s;
  write_text(c.out, name, s);
}

Family need_family(const RunConfig& c) {
  if (c.family_path.empty()) throw PreconditionError("--family is required");
  return load_family(c.family_path);
}

/// Members of the family, or the first few generated members when it has only a generator.
std::vector<Character> members_of(const Family& f, std::size_t sample = 8) {
  if (!f.members.empty() || !f.generator) return f.members;
  std::vector<Character> out;
  for (std::uint64_t i = 0; i < sample; ++i) out.push_back(f.generator->member(i));
  return out;
}

/// --target is a member index or a character.
Character target_of(const RunConfig& c, const std::vector<Character>& fam) {
  const auto& t = c.target;
  if (!t.empty() && std::all_of(t.begin(), t.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    const auto i = std::stoull(t);
    if (i >= fam.size()) throw PreconditionError("--target " + t + " is not a member index");
    return fam[i];
  }
  return parse_character_arg(t);
}

json config_json(const RunConfig& c, const Family& fam) {
  return {{"family", to_json(fam)}, {"learner", c.learner}, {"target", c.target},
          {"seed", c.seed},         {"horizon", c.horizon}, {"window", c.window}};
}

std::string trace_text(const Trace& t) {
  std::ostringstream os;
  write_trace(os, t);
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_check(const RunConfig& c) {
  const Family f = need_family(c);
  const auto fam = members_of(f);
  json j;
  j["members"] = json::array();
  for (const auto& m : fam) j["members"].push_back(m.to_string());
  if (f.members.empty() && f.generator) j["sampled_members"] = fam.size();
  const auto sep = finitely_separable(fam);
  j["finitely_separable"] = sep.separable;
  if (sep.counterexample)
    j["counterexample"] = {{"limit", sep.counterexample->first.to_string()},
                           {"witness", sep.counterexample->second.to_string()}};
  j["fin_antichain"] = fin_antichain(fam);
  j["separators"] = json::array();
  if (sep.separable)
    for (const auto& m : fam) j["separators"].push_back(to_json(separator_of(m, fam)));
  if (f.generator) {
    j["generator"] = {{"name", f.generator->name}, {"bound", c.bound}};
    json verdicts = json::array();
    for (const auto& m : fam) {
      if (m.has_infinite_classes()) continue;
      json v = to_json(is_limit_infinite_bounded(m, *f.generator, c.bound));
      v["member"] = m.to_string();
      verdicts.push_back(v);
    }
    j["generator_verdicts"] = verdicts;
  }
  emit(c, "check.json", j);
  return kOk;
}

struct CellResult {
  std::uint64_t seed;
  SimulationResult result;
};

CellResult simulate_cell(const RunConfig& c, const std::vector<Character>& fam, const Character& target,
                         std::uint64_t seed) {
  auto learner = make_learner(c.learner, fam);
  auto stream = learner->input_kind() == PresentationKind::Text ? fair_text(target, seed) : fair_informant(target, seed);
  return {seed, run_simulation(*learner, *stream, c.horizon, target, Relation::Iso, c.window)};
}

int cmd_simulate(const RunConfig& c) {
  const Family f = need_family(c);
  const auto fam = members_of(f);
  const Character target = target_of(c, fam);
  make_learner(c.learner, fam);  // name and precondition errors before any work
  std::vector<CellResult> cells(c.seeds);
  std::vector<std::exception_ptr> errors(c.seeds);
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= c.seeds) return;
        k = next++;
      }
      try {
        cells[k] = simulate_cell(c, fam, target, c.seed + k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(c.jobs, c.seeds); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  bool all = true;
  json summaries = json::array();
  for (const auto& cell : cells) {
    RunConfig cc = c;
    cc.seed = cell.seed;
    json s = summary_to_json(cell.result);
    s["config"] = config_json(cc, f);
    const std::string dir = c.out.empty() ? "" : (c.seeds == 1 ? c.out : (fs::path(c.out) / ("seed-" + std::to_string(cell.seed))).string());
    write_text(dir, "items.txt", items_to_string(cell.result.trace.items));
    write_text(dir, "trace.txt", trace_text(cell.result.trace));
    write_text(dir, "summary.json", dump(s));
    all = all && cell.result.converged;
    summaries.push_back(s);
  }
  if (c.seeds == 1) {
    std::cout << dump(summaries[0]);
  } else {
    std::cout << dump(json{{"runs", summaries}, {"all_converged", all}});
  }
  return all ? kOk : kViolation;
}

json verdict_json(std::size_t switches, std::size_t mind_changes, std::optional<std::size_t> expansionary,
                  const std::string& verdict) {
  return {{"phase_switches", switches},
          {"mind_changes", mind_changes},
          {"expansionary_stages", expansionary ? json(*expansionary) : json(nullptr)},
          {"verdict", verdict}};
}

int cmd_adversary(const RunConfig& c) {
  if (c.kind == "txt") {
    auto learner = make_learner(c.learner, c.family_path.empty() ? std::vector<Character>{} : members_of(need_family(c)));
    if (learner->input_kind() != PresentationKind::Text) learner = std::make_unique<TxtLearner>(std::move(learner));
    TxtAdversaryOptions opt;
    opt.depth = c.depth;
    opt.width = c.width;
    opt.rounds = c.rounds;
    opt.horizon = c.horizon;
    const auto r = txt_adversary(*learner, opt);
    json v = verdict_json(r.locking_rounds, r.trace.ex_mind_changes.size(), std::nullopt, r.verdict_string());
    if (r.wrong_on) v["wrong_on"] = r.wrong_on->to_string();
    v["final_conjecture"] = conjecture_to_string(r.final_conjecture);
    write_text(c.out, "items.txt", items_to_string(r.trace.items));
    write_text(c.out, "trace.txt", trace_text(r.trace));
    emit(c, "verdict.json", v);
    return kOk;
  }
  if (c.kind != "limit") throw PreconditionError("--kind must be limit or txt");
  const Family f = need_family(c);
  const auto fam = members_of(f);
  const Character limit = target_of(c, fam);
  std::vector<Character> witnesses;
  for (const auto& m : fam)
    if (!iso_eq(m, limit)) witnesses.push_back(m);
  auto learner = make_learner(c.learner, fam);
  Trace trace;
  const auto r = run_limit_adversary(*learner, limit, witnesses, c.horizon, c.seed, &trace);
  json v = verdict_json(r.phase_switches, r.mind_changes, std::nullopt, r.verdict());
  v["presented"] = r.presented.to_string();
  v["final_conjecture"] = conjecture_to_string(r.final_conjecture);
  write_text(c.out, "items.txt", items_to_string(trace.items));
  write_text(c.out, "trace.txt", trace_text(trace));
  emit(c, "verdict.json", v);
  return r.consistent() ? kOk : kViolation;
}

int cmd_diagonalize(const RunConfig& c) {
  const std::vector<Character> fam =
      c.family_path.empty()
          ? std::vector<Character>{Character::of({{1, kOmega}}), Character::of({{2, 1}, {1, kOmega}})}
          : members_of(need_family(c));
  auto learner = make_learner(c.learner, fam);
  const auto run = diagonalize(*learner, c.e, c.horizon);
  const auto& r = run.report;
  auto l = learner->clone();
  l->reset();
  Trace nu;
  for (const auto& it : run.nu.items) nu.record(it, l->feed(it));
  const bool ok = r.consistent();
  json v = verdict_json(0, nu.ex_mind_changes.size(), r.expansionary.size(), ok ? "consistent" : "violation");
  v["e"] = r.e;
  v["stages"] = r.stages;
  v["sigma_e_classes"] = r.sigma_e_classes;
  v["tau_e_classes"] = r.tau_e_classes;
  v["sigma_singletons"] = r.sigma_singletons;
  v["tau_singletons"] = r.tau_singletons;
  v["nu_violations"] = r.nu_violations.size();
  write_text(c.out, "sigma.txt", items_to_string(run.sigma.items));
  write_text(c.out, "tau.txt", items_to_string(run.tau.items));
  write_text(c.out, "nu.txt", items_to_string(run.nu.items));
  emit(c, "verdict.json", v);
  return ok ? kOk : kViolation;
}

int cmd_locking(const RunConfig& c) {
  const std::vector<Character> fam = c.family_path.empty() ? std::vector<Character>{} : members_of(need_family(c));
  const Character target = target_of(c, fam);
  auto learner = make_learner(c.learner, fam);
  Prefix sigma0{learner->input_kind(), {}};
  if (!c.in.empty()) {
    std::ifstream is(c.in);
    if (!is) throw ParseError("cannot read " + c.in);
    sigma0.items = read_items(is);
  }
  const auto v = weak_locking_search(*learner, target, sigma0, c.depth, c.width);
  json j = {{"verdict", v.is_candidate() ? "candidate" : "violator"},
            {"summary", v.to_string()},
            {"sigma_items", v.sigma.items.size()},
            {"depth", v.depth},
            {"width", v.width},
            {"explored", v.explored}};
  if (!v.is_candidate()) {
    j["tau_items"] = v.tau.items.size();
    write_text(c.out, "tau.txt", items_to_string(v.tau.items));
  }
  emit(c, "locking.json", j);
  return kOk;
}

int cmd_bridge(const RunConfig& c, const std::string& action) {
  const Family f = need_family(c);
  const auto fam = members_of(f);
  if (action == "translate") {
    json j = json::array();
    for (const auto& m : fam) {
      const auto l = Language::of(m);
      std::vector<std::uint64_t> codes;
      for (std::uint64_t x = 0; x < c.bound; ++x)
        if (lang_member(l, x)) codes.push_back(x);
      j.push_back({{"member", m.to_string()}, {"language", to_json(l)}, {"codes_below_bound", codes_to_json(codes)}});
    }
    emit(c, "translate.json", j);
    return kOk;
  }
  if (action == "telltale") {
    const bool sep = finitely_separable(fam).separable;
    json rows = json::array();
    bool all = true;
    std::vector<Language> langs;
    for (const auto& m : fam) langs.push_back(Language::of(m));
    for (const auto& m : fam) {
      const auto variants = c.mode == "explicit" ? std::vector<Language>{Language::of(m)} : permutation_variants(m, c.seed);
      for (const auto& l : variants) {
        const auto r = c.mode == "explicit" ? telltale_search(l, langs, c.bound) : telltale_search_closure(l, fam, c.bound);
        all = all && r.found();
        rows.push_back({{"language", l.to_string()}, {"telltale", r.found() ? codes_to_json(*r.d) : json(nullptr)}});
      }
    }
    json j = {{"mode", c.mode}, {"bound", c.bound}, {"finitely_separable", sep}, {"all_found", all}, {"languages", rows}};
    // In the closure, tell-tales exist for all translated languages exactly
    // when the family is finitely separable.
    const bool ok = c.mode == "explicit" ? all : all == sep;
    j["consistent"] = ok;
    emit(c, "telltale.json", j);
    return ok ? kOk : kViolation;
  }
  if (action == "roundtrip") {
    json rows = json::array();
    bool all = true;
    for (const auto& m : fam) {
      const bool checked = detail::learnable_setting(fam);
      MStarLearner base(fam, checked);
      LangToStructLearner via(StructToLangLearner(std::make_unique<MStarLearner>(fam, checked)));
      auto s0 = fair_informant(m, c.seed), s1 = fair_informant(m, c.seed);
      const auto r0 = run_simulation(base, *s0, c.horizon, m, Relation::Iso, c.window);
      const auto r1 = run_simulation(via, *s1, c.horizon, m, Relation::Iso, c.window);
      const bool same = r0.converged && r1.converged && r0.trace.conjectures.back() == r1.trace.conjectures.back();
      all = all && same;
      rows.push_back({{"member", m.to_string()},
                      {"mstar", summary_to_json(r0)},
                      {"round_trip", summary_to_json(r1)},
                      {"agree", same}});
    }
    emit(c, "roundtrip.json", {{"runs", rows}, {"all_agree", all}});
    return all ? kOk : kViolation;
  }
  throw PreconditionError("bridge action must be translate, telltale or roundtrip");
}

int cmd_replay(const RunConfig& c) {
  if (c.in.empty()) throw PreconditionError("--in is required");
  const fs::path in(c.in);
  const fs::path dir = fs::is_directory(in) ? in : in.parent_path();
  const fs::path items_path = fs::is_directory(in) ? in / "items.txt" : in;
  std::optional<json> recorded;
  if (fs::exists(dir / "summary.json")) recorded = parse_json_text(read_file((dir / "summary.json").string()), "summary.json");

  RunConfig cc = c;
  Family f;
  if (recorded && recorded->contains("config")) {
    const auto& cfg = (*recorded)["config"];
    f = family_from_json(cfg["family"]);
    cc.learner = cfg["learner"].get<std::string>();
    cc.target = cfg["target"].get<std::string>();
    cc.seed = cfg["seed"].get<std::uint64_t>();
    cc.horizon = cfg["horizon"].get<std::size_t>();
    cc.window = cfg["window"].get<std::size_t>();
  } else {
    f = need_family(c);
  }
  const auto fam = members_of(f);
  const Character target = target_of(cc, fam);
  std::ifstream is(items_path);
  if (!is) throw ParseError("cannot read " + items_path.string());
  const auto items = read_items(is);
  state_of(Prefix{PresentationKind::Informant, items});  // rejects inconsistent files
  auto learner = make_learner(cc.learner, fam);
  learner->reset();
  Trace t;
  for (const auto& it : items) t.record(it, learner->feed(it));
  const auto r = evaluate_trace(std::move(t), target, Relation::Iso, cc.window);
  json s = summary_to_json(r);
  s["config"] = config_json(cc, f);
  std::cout << dump(s);
  if (!recorded) return kOk;
  const bool same = dump(s) == dump(*recorded);
  const std::string trace_file = (dir / "trace.txt").string();
  const bool same_trace = !fs::exists(trace_file) || read_file(trace_file) == trace_text(r.trace);
  if (!same || !same_trace) {
    std::cerr << "replay differs from the recorded " << (same ? "trace" : "summary") << "\n";
    return kViolation;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning equivalence structures in the limit"};
  app.require_subcommand(1);
  RunConfig cfg;
  if (const char* s = std::getenv("LIMITLEARN_SEED")) {
    try {
      cfg.seed = std::stoull(s);
    } catch (const std::exception&) {
      std::cerr << "LIMITLEARN_SEED is not a number: " << s << "\n";
      return kParse;
    }
  }

  auto common = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family_path, "Family JSON file");
    sub->add_option("--learner", cfg.learner, "Learner name")->capture_default_str();
    sub->add_option("--target", cfg.target, "Member index or character")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Seed (default: LIMITLEARN_SEED or 0)")->capture_default_str();
    sub->add_option("--horizon", cfg.horizon, "Stages / items / diagonal stages")->capture_default_str();
    sub->add_option("--window", cfg.window, "Convergence window")->capture_default_str();
    sub->add_option("--depth", cfg.depth, "Locking search depth")->capture_default_str();
    sub->add_option("--width", cfg.width, "Locking search width")->capture_default_str();
    sub->add_option("--bound", cfg.bound, "Search bound")->capture_default_str();
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--jobs", cfg.jobs, "Parallel cells")->capture_default_str();
  };

  auto* check = app.add_subcommand("check", "Separability certificate for a family");
  auto* simulate = app.add_subcommand("simulate", "Run a learner on fair presentations");
  auto* adversary = app.add_subcommand("adversary", "Run the limit or text adversary");
  auto* diag = app.add_subcommand("diagonalize", "Two-structure diagonalization against a learner");
  auto* locking = app.add_subcommand("locking", "Weak locking-sequence search");
  auto* bridge = app.add_subcommand("bridge", "Structure/language translation");
  auto* replay = app.add_subcommand("replay", "Re-run a learner on a recorded item file");
  for (auto* s : {check, simulate, adversary, diag, locking, bridge, replay}) common(s);
  simulate->add_option("--seeds", cfg.seeds, "Number of consecutive seeds")->capture_default_str();
  adversary->add_option("--kind", cfg.kind, "limit or txt")->capture_default_str();
  adversary->add_option("--rounds", cfg.rounds, "Locking rounds (txt)")->capture_default_str();
  diag->add_option("--e", cfg.e, "Class size e >= 2")->capture_default_str();
  locking->add_option("--in", cfg.in, "Start prefix (item file)");
  std::string action;
  bridge->add_option("action", action, "translate | telltale | roundtrip")->required();
  bridge->add_option("--mode", cfg.mode, "closure or explicit (telltale)")->capture_default_str();
  replay->add_option("--in", cfg.in, "Run directory or item file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (cfg.jobs < 1) throw PreconditionError("--jobs must be >= 1");
    if (*simulate || *replay || (*bridge && action == "roundtrip")) validate(cfg);
    if (*check) return cmd_check(cfg);
    if (*simulate) return cmd_simulate(cfg);
    if (*adversary) return cmd_adversary(cfg);
    if (*diag) return cmd_diagonalize(cfg);
    if (*locking) return cmd_locking(cfg);
    if (*bridge) return cmd_bridge(cfg, action);
    if (*replay) return cmd_replay(cfg);
  } catch (const RepresentationError& e) {
    std::cerr << "representation error: " << e.what() << "\n";
    return kRepresentation;
  } catch (const InconsistentPrefix& e) {
    std::cerr << "representation error: " << e.what() << "\n";
    return kRepresentation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const PreconditionError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kParse;
  } catch (const UnknownName& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kParse;
  }
  return kParse;
}
