// lattice-tri: sampling, exact analysis, experiments and rendering for
// weighted lattice triangulations of an n x k rectangle.
//
// Every numeric artifact is a pure function of (config file, flags, seed);
// wall-clock timings go to stderr only. Artifacts are written atomically and
// carry the hash of the effective configuration.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lattri/exact.hpp"
#include "lattri/experiments.hpp"
#include "lattri/io.hpp"
#include "lattri/svg.hpp"

namespace {

using namespace lattri;

// A subcommand's flags, each tied to a config key. The effective config is
// the --config file (if any) with present flags layered on top.
struct FlagBag {
  struct Entry {
    std::string key;
    std::shared_ptr<std::string> value;
    CLI::Option* opt = nullptr;
  };
  std::vector<Entry> entries;
  std::shared_ptr<std::string> config_path = std::make_shared<std::string>();
  CLI::Option* config_opt = nullptr;
  std::shared_ptr<bool> overlay = std::make_shared<bool>(false);
  CLI::Option* overlay_opt = nullptr;

  void option(CLI::App* cmd, const std::string& flag, const std::string& key,
              const std::string& desc) {
    auto store = std::make_shared<std::string>();
    entries.push_back({key, store, cmd->add_option(flag, *store, desc)});
  }
  void config(CLI::App* cmd) {
    config_opt = cmd->add_option("--config", *config_path,
                                 "key=value config file with [sections]");
  }
  void overlay_flag(CLI::App* cmd) {
    overlay_opt = cmd->add_flag("--ground-overlay", *overlay,
                                "draw the ground state dashed underneath");
  }

  Config effective() const {
    Config cfg;
    if (config_opt && config_opt->count() > 0)
      cfg = parse_config(read_file(*config_path));
    for (const Entry& e : entries)
      if (e.opt->count() > 0) cfg.set(e.key, *e.value);
    if (overlay_opt && overlay_opt->count() > 0)
      cfg.set("render.ground_overlay", "true");
    return cfg;
  }
};

void add_region_flags(CLI::App* cmd, FlagBag& bag) {
  bag.option(cmd, "--n", "region.n", "rectangle width");
  bag.option(cmd, "--k", "region.k", "rectangle height");
  bag.option(cmd, "--enlarge", "region.enlarge", "enlargement N (width n+2N)");
}

void add_chain_flags(CLI::App* cmd, FlagBag& bag) {
  bag.option(cmd, "--lambda", "chain.lambda", "edge-length weight (p/q or decimal)");
  bag.option(cmd, "--seed", "chain.seed", "master seed");
}

void add_limit_flags(CLI::App* cmd, FlagBag& bag) {
  bag.option(cmd, "--cap", "limits.state_cap", "state-count cap for enumeration");
  bag.option(cmd, "--horizon", "limits.horizon", "step cap for searches");
}

void add_output_flag(CLI::App* cmd, FlagBag& bag) {
  bag.option(cmd, "--out", "output.path", "artifact directory (default .)");
}

std::shared_ptr<const ConstraintSet> region_from(const Config& cfg) {
  const std::int64_t n = cfg.get_int("region.n", 0);
  if (n <= 0) throw input_error("region.n is required (pass --n)");
  const std::int64_t k = cfg.get_int("region.k", 1);
  const std::int64_t N = cfg.get_int("region.enlarge", 0);
  return make_constraints(make_region(static_cast<std::int32_t>(n),
                                      static_cast<std::int32_t>(k),
                                      static_cast<std::int32_t>(N)));
}

std::filesystem::path out_dir(const Config& cfg) {
  std::filesystem::path dir = cfg.get("output.path", ".");
  std::filesystem::create_directories(dir);
  return dir;
}

std::size_t cap_from(const Config& cfg) {
  return static_cast<std::size_t>(
      cfg.get_int("limits.state_cap", static_cast<std::int64_t>(kDefaultStateCap)));
}

std::vector<std::int32_t> parse_int_list(const std::string& text, const char* what) {
  std::vector<std::int32_t> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ','))
    out.push_back(detail::parse_number<std::int32_t>(detail::trim(tok), what));
  if (out.empty()) throw input_error(std::string("empty list for ") + what);
  return out;
}

ExactModel model_from(const Config& cfg) {
  auto cs = region_from(cfg);
  const LambdaValue lam = parse_lambda(cfg.get("chain.lambda", "1"));
  auto en = std::make_shared<Enumeration>(enumerate_states(cs, cap_from(cfg)));
  return build_model(std::move(en), lam.value);
}

// ---------------------------------------------------------------------------

int cmd_sample(const Config& cfg) {
  auto cs = region_from(cfg);
  const LambdaValue lam = parse_lambda(cfg.get("chain.lambda", "1"));
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("chain.seed", 0));
  const auto steps = static_cast<std::uint64_t>(cfg.get_int("chain.steps", 10000));
  const auto thin = static_cast<std::uint64_t>(cfg.get_int("chain.thin", 0));
  const std::uint64_t hash = cfg.hash();
  const auto dir = out_dir(cfg);

  const ChainSpec spec = make_chain_spec(cs, lam.value, seed);
  std::ostringstream traj;
  traj << artifact_header(seed, hash) << "step,total_length\n";
  std::vector<Observer> observers;
  if (thin > 0)
    observers.push_back({thin, [&traj](const ChainState& st) {
                           traj << st.step << "," << st.t.total_length() << "\n";
                         }});
  RunStats stats;
  const ChainState st = run(spec, ground_state(cs), steps, observers, &stats);

  atomic_write(dir / "sample.tri", save_triangulation(st.t, lam.token));
  atomic_write(dir / "sample.checkpoint", save_checkpoint(st, lam.token));
  if (thin > 0) atomic_write(dir / "trajectory.csv", traj.str());
  std::cout << "total_length=" << st.t.total_length() << "\n";
  std::cerr << "# " << stats.steps << " steps, " << stats.accepted << " accepted, "
            << stats.seconds << " s\n";
  return 0;
}

int cmd_enumerate(const Config& cfg) {
  auto cs = region_from(cfg);
  const LambdaValue lam = parse_lambda(cfg.get("chain.lambda", "1"));
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("chain.seed", 0));
  const std::uint64_t hash = cfg.hash();
  const auto dir = out_dir(cfg);

  auto en = std::make_shared<Enumeration>(enumerate_states(cs, cap_from(cfg)));
  const ExactModel m = build_model(en, lam.value);
  atomic_write(dir / "states.csv", states_csv(m, seed, hash));
  atomic_write(dir / "transition.mtx", matrix_market(m));
  std::cout << en->size() << "\n";
  return 0;
}

int cmd_spectrum(const Config& cfg) {
  const ExactModel m = model_from(cfg);
  const Spectrum sp = spectral_gap(m);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("chain.seed", 0));
  const std::uint64_t hash = cfg.hash();

  std::vector<std::pair<std::string, std::string>> kv{
      {"states", std::to_string(m.size())},
      {"lambda", cfg.get("chain.lambda", "1")},
      {"gap", fmt_double(sp.gap)},
      {"t_rel", fmt_double(sp.t_rel)},
      {"solver", sp.dense ? "dense" : "power-iteration"},
  };
  atomic_write(out_dir(cfg) / "spectrum.txt", report_text(kv, seed, hash));
  std::cout << "gap=" << fmt_double(sp.gap) << "\n"
            << "t_rel=" << fmt_double(sp.t_rel) << "\n";
  return 0;
}

int cmd_mixing(const Config& cfg) {
  const ExactModel m = model_from(cfg);
  const double eps = cfg.get_double("mixing.eps", 0.25);
  const auto horizon =
      static_cast<std::uint64_t>(cfg.get_int("limits.horizon", 1000000000));
  const std::int64_t tmix = exact_mixing_time(m, eps, horizon);
  const Spectrum sp = spectral_gap(m);
  const LogSobolevBounds lsb = log_sobolev_bounds(m, sp.t_rel);
  const double spectral_upper =
      lsb.pi_min > 0 ? sp.t_rel * (2.0 + std::log(1.0 / lsb.pi_min)) : 0.0;
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("chain.seed", 0));
  const std::uint64_t hash = cfg.hash();

  std::vector<std::pair<std::string, std::string>> kv{
      {"states", std::to_string(m.size())},
      {"lambda", cfg.get("chain.lambda", "1")},
      {"eps", fmt_double(eps)},
      {"tmix", std::to_string(tmix)},
      {"gap", fmt_double(sp.gap)},
      {"t_rel", fmt_double(sp.t_rel)},
      {"spectral_upper", fmt_double(spectral_upper)},
      {"pi_min", fmt_double(lsb.pi_min)},
      {"sobolev_lower", fmt_double(lsb.lower)},
  };
  if (lsb.upper) kv.emplace_back("sobolev_upper", fmt_double(*lsb.upper));
  atomic_write(out_dir(cfg) / "mixing.txt", report_text(kv, seed, hash));
  std::cout << "tmix=" << tmix << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// experiments

ExperimentSpec experiment_spec(const Config& cfg,
                               std::shared_ptr<const ConstraintSet> cs) {
  const LambdaValue lam = parse_lambda(cfg.get("chain.lambda", "1"));
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("chain.seed", 0));
  const std::int32_t n = cs->region->n;
  ExperimentSpec spec;
  spec.chain = make_chain_spec(std::move(cs), lam.value, seed);
  spec.replicas = cfg.get_int("experiment.replicas", 100);
  spec.burn_in = static_cast<std::uint64_t>(
      cfg.get_int("experiment.burn_in",
                  static_cast<std::int64_t>(default_burn_in(n))));
  spec.window = static_cast<std::uint64_t>(cfg.get_int(
      "experiment.window", static_cast<std::int64_t>(default_window(n))));
  return spec;
}

int cmd_edge_tail(const Config& cfg) {
  auto cs = region_from(cfg);
  const ExperimentSpec spec = experiment_spec(cfg, cs);
  const std::int64_t ell_min = cfg.get_int("experiment.ell_min", 4);
  const std::int64_t ell_max = cfg.get_int("experiment.ell_max", 16);
  if (ell_min > ell_max) throw input_error("ell_min exceeds ell_max");
  std::vector<std::int64_t> ells;
  for (std::int64_t ell = ell_min; ell <= ell_max; ++ell) ells.push_back(ell);

  const EdgeTailResult res = edge_tail(spec, {}, ells);
  const auto seed = spec.chain.seed;
  const std::uint64_t hash = cfg.hash();
  const auto dir = out_dir(cfg);
  atomic_write(dir / "edge_tail.csv", edge_tail_csv(res, seed, hash));

  std::vector<std::pair<std::string, std::string>> kv{
      {"replicas", std::to_string(res.replicas)},
      {"midpoints", std::to_string(res.mid_ids.size())},
  };
  if (res.pooled_fit) {
    kv.emplace_back("pooled_slope", fmt_double(res.pooled_fit->slope));
    kv.emplace_back("pooled_r2", fmt_double(res.pooled_fit->r2));
    std::cout << "pooled_slope=" << fmt_double(res.pooled_fit->slope) << "\n";
  } else {
    std::cout << "pooled_slope=nan\n";
  }
  atomic_write(dir / "edge_tail.txt", report_text(kv, seed, hash));
  return 0;
}

int cmd_occupancy(const Config& cfg) {
  auto cs = region_from(cfg);
  const ExperimentSpec spec = experiment_spec(cfg, cs);
  const double C = cfg.get_double("experiment.good_c", 10.0);
  const OccupancyResult res = good_ensemble_occupancy(spec, C);
  const auto seed = spec.chain.seed;
  const std::uint64_t hash = cfg.hash();

  std::vector<std::pair<std::string, std::string>> kv{
      {"fraction", fmt_double(res.fraction)},
      {"replicas", std::to_string(res.replicas)},
      {"bound", fmt_double(res.bound)},
      {"breaches", std::to_string(res.breaches.size())},
  };
  atomic_write(out_dir(cfg) / "occupancy.txt", report_text(kv, seed, hash));
  std::cout << "fraction=" << fmt_double(res.fraction) << "\n";
  return 0;
}

int cmd_crossings(const Config& cfg) {
  auto cs = region_from(cfg);
  ExperimentSpec spec = experiment_spec(cfg, cs);
  SlabSpec slab;
  slab.x_lo = static_cast<std::int32_t>(cfg.get_int("experiment.slab_lo", 0));
  slab.x_hi = static_cast<std::int32_t>(cfg.get_int("experiment.slab_hi", 0));
  if (slab.x_hi == 0) throw input_error("experiment.slab_hi is required");
  const double delta = cfg.get_double("experiment.delta", 0.05);
  const auto thinning = static_cast<std::uint64_t>(
      cfg.get_int("experiment.thinning",
                  static_cast<std::int64_t>(default_thinning(*cs->region))));
  const std::int64_t samples = cfg.get_int("experiment.samples", 200);
  const std::int64_t min_width = cfg.get_int("experiment.m0", 4);

  const CrossingResult res =
      crossing_experiment(spec, slab, delta, thinning, samples,
                          static_cast<std::int32_t>(min_width));
  const auto seed = spec.chain.seed;
  const std::uint64_t hash = cfg.hash();
  const auto dir = out_dir(cfg);
  atomic_write(dir / "crossings.csv", crossings_csv(res, seed, hash));

  std::vector<std::pair<std::string, std::string>> kv{
      {"slab_lo", std::to_string(res.slab.x_lo)},
      {"slab_hi", std::to_string(res.slab.x_hi)},
      {"delta", fmt_double(res.delta)},
      {"samples", std::to_string(res.counts.size())},
      {"breach_frequency", fmt_double(res.breach_frequency)},
      {"lag1", fmt_double(res.lag1)},
      {"under_thinned", res.under_thinned ? "true" : "false"},
  };
  atomic_write(dir / "crossings.txt", report_text(kv, seed, hash));
  std::cout << "breach_frequency=" << fmt_double(res.breach_frequency) << "\n";
  return 0;
}

int cmd_decay(const Config& cfg, const std::string& bc_a_path,
              const std::string& bc_b_path) {
  auto cs = region_from(cfg);
  const Region& r = *cs->region;
  std::shared_ptr<const ConstraintSet> bc_a, bc_b;
  if (!bc_a_path.empty() || !bc_b_path.empty()) {
    if (bc_a_path.empty() || bc_b_path.empty())
      throw input_error("give both --bc-a and --bc-b or neither");
    bc_a = load_constraints(read_file(bc_a_path));
    bc_b = load_constraints(read_file(bc_b_path));
  } else {
    // default pair: the two diagonals of the leftmost bottom unit cell
    bc_a = make_constraints(cs->region, {make_edge({r.x_lo, 0}, {r.x_lo + 1, 1})});
    bc_b = make_constraints(cs->region, {make_edge({r.x_lo, 1}, {r.x_lo + 1, 0})});
  }

  const LambdaValue lam = parse_lambda(cfg.get("chain.lambda", "1"));
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("chain.seed", 0));
  const std::string method_name = cfg.get("experiment.method", "chains");
  DecayMethod method;
  if (method_name == "chains") method = DecayMethod::chains;
  else if (method_name == "exact") method = DecayMethod::exact;
  else throw input_error("method must be exact or chains");

  const std::int32_t n = bc_a->region->n;
  const auto burn_in = static_cast<std::uint64_t>(cfg.get_int(
      "experiment.burn_in", static_cast<std::int64_t>(default_burn_in(n))));
  const auto window = static_cast<std::uint64_t>(cfg.get_int(
      "experiment.window", static_cast<std::int64_t>(default_window(n))));
  const std::int64_t replicas = cfg.get_int("experiment.replicas", 100);

  std::vector<SlabSpec> slabs;
  for (const std::int32_t w :
       parse_int_list(cfg.get("experiment.widths", "1,2,3"), "experiment.widths"))
    slabs.push_back(SlabSpec{1, 1 + w});

  const CorrelationDecayResult res =
      correlation_decay(bc_a, bc_b, lam.value, seed, slabs, burn_in, window,
                        replicas, method, cap_from(cfg));
  const std::uint64_t hash = cfg.hash();
  const auto dir = out_dir(cfg);

  std::ostringstream csv;
  csv << artifact_header(seed, hash) << "slab_lo,slab_hi,width,disagreement,ci_half\n";
  for (const CorrelationDecayPoint& p : res.points)
    csv << p.slab.x_lo << "," << p.slab.x_hi << "," << p.slab.width() << ","
        << fmt_double(p.disagreement) << "," << fmt_double(p.ci_half) << "\n";
  atomic_write(dir / "decay.csv", csv.str());

  std::vector<std::pair<std::string, std::string>> kv{
      {"method", method_name},
      {"points", std::to_string(res.points.size())},
  };
  if (res.fit) {
    kv.emplace_back("slope", fmt_double(res.fit->slope));
    kv.emplace_back("r2", fmt_double(res.fit->r2));
  }
  atomic_write(dir / "decay.txt", report_text(kv, seed, hash));
  std::cout << "points=" << res.points.size() << "\n";
  return 0;
}

int cmd_scaling(const Config& cfg) {
  const auto k = static_cast<std::int32_t>(cfg.get_int("region.k", 1));
  const LambdaValue lam = parse_lambda(cfg.get("chain.lambda", "1"));
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("chain.seed", 0));
  const std::string method = cfg.get("experiment.method", "exact");
  const std::int64_t pairs = cfg.get_int("experiment.pairs", 50);
  const auto horizon =
      static_cast<std::uint64_t>(cfg.get_int("limits.horizon", 100000000));
  const std::vector<std::int32_t> sizes =
      parse_int_list(cfg.get("experiment.sizes", "2,3,4,5,6"), "experiment.sizes");

  const ScalingResult res = mixing_scaling(k, lam.value, seed, sizes, method,
                                           cap_from(cfg), pairs, horizon);
  const std::uint64_t hash = cfg.hash();
  const auto dir = out_dir(cfg);
  atomic_write(dir / "scaling.csv", scaling_csv(res, seed, hash));

  std::vector<std::pair<std::string, std::string>> kv{
      {"method", method},
      {"rows", std::to_string(res.rows.size())},
  };
  if (res.loglog) {
    kv.emplace_back("exponent", fmt_double(res.loglog->slope));
    kv.emplace_back("r2", fmt_double(res.loglog->r2));
    std::cout << "exponent=" << fmt_double(res.loglog->slope) << "\n";
  } else {
    std::cout << "exponent=nan\n";
  }
  atomic_write(dir / "scaling.txt", report_text(kv, seed, hash));
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_render(const Config& cfg, const std::string& in_path) {
  Triangulation t = in_path.empty()
                        ? ground_state(region_from(cfg))
                        : load_triangulation(read_file(in_path));
  RenderSpec rs;
  rs.scale = cfg.get_double("render.scale", 40.0);
  rs.ground_overlay = cfg.get_bool("render.ground_overlay", false);
  const auto highlights = cfg.find("render.highlights");
  if (highlights)
    rs.highlight_mids = parse_int_list(*highlights, "render.highlights");
  atomic_write(out_dir(cfg) / "render.svg", render_svg(t, rs));
  return 0;
}

int cmd_validate(const std::string& in_path, const std::string& constraints_path) {
  std::shared_ptr<const ConstraintSet> cs;
  if (!constraints_path.empty()) cs = load_constraints(read_file(constraints_path));
  const Triangulation t = load_triangulation(read_file(in_path), std::move(cs));
  std::cout << "valid total_length=" << t.total_length() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted lattice triangulations: sampling, exact analysis, rendering"};
  app.require_subcommand(1);
  std::deque<FlagBag> bags;
  std::function<int()> action;

  const auto bind = [&](CLI::App* cmd, FlagBag* bag,
                        std::function<int(const Config&)> fn) {
    cmd->callback([&action, bag, fn = std::move(fn)]() {
      action = [bag, fn]() { return fn(bag->effective()); };
    });
  };

  {
    CLI::App* c = app.add_subcommand("sample", "run one Glauber chain from the ground state");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_chain_flags(c, b);
    add_output_flag(c, b);
    b.option(c, "--steps", "chain.steps", "number of steps");
    b.option(c, "--thin", "chain.thin", "record total length every this many steps");
    bind(c, &b, cmd_sample);
  }
  {
    CLI::App* c = app.add_subcommand("enumerate", "enumerate all states; write list + transition matrix");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_chain_flags(c, b);
    add_limit_flags(c, b);
    add_output_flag(c, b);
    bind(c, &b, cmd_enumerate);
  }
  {
    CLI::App* c = app.add_subcommand("spectrum", "spectral gap and relaxation time");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_chain_flags(c, b);
    add_limit_flags(c, b);
    add_output_flag(c, b);
    bind(c, &b, cmd_spectrum);
  }
  {
    CLI::App* c = app.add_subcommand("mixing", "exact mixing time and comparison bounds");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_chain_flags(c, b);
    add_limit_flags(c, b);
    add_output_flag(c, b);
    b.option(c, "--eps", "mixing.eps", "total-variation threshold (default 1/4)");
    bind(c, &b, cmd_mixing);
  }

  CLI::App* exp = app.add_subcommand("experiment", "statistical experiments on chains");
  exp->require_subcommand(1);
  {
    CLI::App* c = exp->add_subcommand("edge_tail", "equilibrium edge-length tail frequencies");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_chain_flags(c, b);
    add_output_flag(c, b);
    b.option(c, "--replicas", "experiment.replicas", "independent chains");
    b.option(c, "--burn-in", "experiment.burn_in", "steps before measuring");
    b.option(c, "--ell-min", "experiment.ell_min", "smallest length threshold");
    b.option(c, "--ell-max", "experiment.ell_max", "largest length threshold");
    bind(c, &b, cmd_edge_tail);
  }
  {
    CLI::App* c = exp->add_subcommand("occupancy", "fraction of replicas staying in the good ensemble");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_chain_flags(c, b);
    add_output_flag(c, b);
    b.option(c, "--replicas", "experiment.replicas", "independent chains");
    b.option(c, "--burn-in", "experiment.burn_in", "steps before the watch window");
    b.option(c, "--window", "experiment.window", "watched steps after burn-in");
    b.option(c, "--good-c", "experiment.good_c", "edge-length bound constant C");
    bind(c, &b, cmd_occupancy);
  }
  {
    CLI::App* c = exp->add_subcommand("crossings", "vertical crossings of a slab along one long chain");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_chain_flags(c, b);
    add_output_flag(c, b);
    b.option(c, "--burn-in", "experiment.burn_in", "steps before the first sample");
    b.option(c, "--slab-lo", "experiment.slab_lo", "left slab boundary");
    b.option(c, "--slab-hi", "experiment.slab_hi", "right slab boundary");
    b.option(c, "--delta", "experiment.delta", "breach threshold fraction");
    b.option(c, "--thinning", "experiment.thinning", "steps between samples");
    b.option(c, "--samples", "experiment.samples", "number of thinned samples");
    b.option(c, "--m0", "experiment.m0", "minimum slab width");
    bind(c, &b, cmd_crossings);
  }
  {
    CLI::App* c = exp->add_subcommand("decay", "boundary influence vs slab width");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_chain_flags(c, b);
    add_limit_flags(c, b);
    add_output_flag(c, b);
    b.option(c, "--replicas", "experiment.replicas", "independent coupled pairs");
    b.option(c, "--burn-in", "experiment.burn_in", "coupled steps before measuring");
    b.option(c, "--window", "experiment.window", "measured coupled steps");
    b.option(c, "--widths", "experiment.widths", "comma list of slab widths");
    b.option(c, "--method", "experiment.method", "exact | chains");
    auto bc_a = std::make_shared<std::string>();
    auto bc_b = std::make_shared<std::string>();
    c->add_option("--bc-a", *bc_a, "constraints file for side A");
    c->add_option("--bc-b", *bc_b, "constraints file for side B");
    FlagBag* bp = &b;
    c->callback([&action, bp, bc_a, bc_b]() {
      action = [bp, bc_a, bc_b]() {
        return cmd_decay(bp->effective(), *bc_a, *bc_b);
      };
    });
  }
  {
    CLI::App* c = exp->add_subcommand("scaling", "mixing time vs rectangle width");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    b.option(c, "--k", "region.k", "rectangle height");
    add_chain_flags(c, b);
    add_limit_flags(c, b);
    add_output_flag(c, b);
    b.option(c, "--sizes", "experiment.sizes", "comma list of widths n");
    b.option(c, "--method", "experiment.method", "exact | coupling");
    b.option(c, "--pairs", "experiment.pairs", "coupled pairs per size");
    bind(c, &b, cmd_scaling);
  }

  {
    CLI::App* c = app.add_subcommand("render", "SVG picture of a triangulation");
    FlagBag& b = bags.emplace_back();
    b.config(c);
    add_region_flags(c, b);
    add_output_flag(c, b);
    b.option(c, "--scale", "render.scale", "pixels per lattice unit");
    b.option(c, "--highlights", "render.highlights", "comma list of midpoint ids");
    b.overlay_flag(c);
    auto in = std::make_shared<std::string>();
    c->add_option("--in", *in, "triangulation file (default: ground state of --n/--k)");
    FlagBag* bp = &b;
    c->callback([&action, bp, in]() {
      action = [bp, in]() { return cmd_render(bp->effective(), *in); };
    });
  }
  {
    CLI::App* c = app.add_subcommand("validate", "check a triangulation file");
    auto in = std::make_shared<std::string>();
    auto cons = std::make_shared<std::string>();
    c->add_option("--in", *in, "triangulation file")->required();
    c->add_option("--constraints", *cons, "constraints file");
    c->callback([&action, in, cons]() {
      action = [in, cons]() { return cmd_validate(*in, *cons); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    code = action();
  } catch (const cap_exceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  std::cerr << "# elapsed " << dt.count() << " s\n";
  return code;
}
