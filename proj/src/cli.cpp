#include "lorentz_ot/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lorentz_ot/dynamics.hpp"
#include "lorentz_ot/errors.hpp"
#include "lorentz_ot/feasibility.hpp"
#include "lorentz_ot/io.hpp"
#include "lorentz_ot/monge.hpp"
#include "lorentz_ot/transport.hpp"

namespace lorentz_ot::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string model;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string mu, nu, plan, out, witness, report, trajectories;
  double epsilon = 0.0;
  double t = 0.0;
  double eps_time = 0.1;
  int trials = 16;
  int n = 64;
  int count = 100;
};

std::string format_set(const ViolatingSet& set) {
  std::ostringstream s;
  s << (set.side == Side::source ? "A" : "B") << " = {";
  for (std::size_t k = 0; k < set.indices.size(); ++k) s << (k ? "," : "") << set.indices[k] + 1;
  s << "}";
  return s.str();
}

class Runner {
 public:
  Runner(const Options& opt, std::ostream& out) : opt_(opt), out_(out) { out_.precision(17); }

  fs::path output_path(const std::string& name) const {
    fs::path p(name);
    if (!opt_.out_dir.empty() && p.is_relative()) p = fs::path(opt_.out_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
  }

  // Writes through `emit` to the named file, or to stdout when no name is given.
  template <typename Emit>
  void emit_to(const std::string& name, Emit emit) const {
    if (name.empty()) {
      emit(out_);
      return;
    }
    std::ofstream file(output_path(name));
    if (!file) throw ParseError("cannot write " + name);
    emit(file);
  }

  std::shared_ptr<const SpacetimeModel> model() const {
    if (opt_.model.empty()) throw ParseError("--model is required");
    return io::read_model(opt_.model);
  }

  std::pair<DiscreteMeasure, DiscreteMeasure> measures() const {
    if (opt_.mu.empty() || opt_.nu.empty()) throw ParseError("--mu and --nu are required");
    return {io::read_measure(opt_.mu), io::read_measure(opt_.nu)};
  }

  int feasible() {
    const auto m = model();
    const auto [mu, nu] = measures();
    const FeasibilityVerdict v = j_related(build_relation(*m, mu, nu, opt_.epsilon), mu, nu);
    if (!v.related) {
      out_ << "not related\n" << format_set(*v.violating_set) << "\n";
      return 1;
    }
    out_ << "related\ndenominator " << v.denominator << "\n";
    if (!opt_.witness.empty())
      emit_to(opt_.witness, [&](std::ostream& f) {
        f.precision(17);
        const Eigen::MatrixXd& c = *v.witness_coupling;
        for (Index i = 0; i < c.rows(); ++i)
          for (Index j = 0; j < c.cols(); ++j)
            if (c(i, j) > 0.0) f << i + 1 << ' ' << j + 1 << ' ' << c(i, j) << '\n';
      });
    return 0;
  }

  int solve_cmd() {
    const auto m = model();
    const auto [mu, nu] = measures();
    const TransportPlan plan = solve(mu, nu, cost_matrix(*m, mu, nu));
    out_ << "primal " << plan.primal_cost << "\ndual " << plan.dual_value << "\n";
    if (!opt_.out.empty())
      emit_to(opt_.out, [&](std::ostream& f) { io::write_plan(f, io::PlanFile{m, mu, nu, plan}); });
    return 0;
  }

  DynamicalCoupling lifted() const {
    if (opt_.plan.empty()) throw ParseError("--plan is required");
    const io::PlanFile file = io::read_plan(opt_.plan);
    return lift(file.plan, *file.model, file.mu, file.nu);
  }

  int interpolate_cmd() {
    const DynamicalCoupling dc = lifted();
    const DiscreteMeasure m = interpolate(dc, opt_.t);
    emit_to(opt_.out, [&](std::ostream& f) { io::write_measure(f, m); });
    return 0;
  }

  void write_report(std::ostream& f, const RegularityReport& r) const {
    f.precision(17);
    f << "pairs " << r.pairs << "\neps_time " << r.eps_time << "\nmax_ratio " << r.max_ratio << "\nfitted_exponent "
      << r.fitted_exponent << "\nfitted_constant " << r.fitted_constant << "\nenvelope_points " << r.envelope_points
      << "\ncrossings " << r.crossings << "\nmax_speed_ratio " << r.max_speed_ratio << "\ndegenerate "
      << (r.degenerate ? "yes" : "no") << "\n";
  }

  int diagnose() {
    const DynamicalCoupling dc = lifted();
    const RegularityReport r = regularity_report(dc, opt_.eps_time);
    emit_to(opt_.report, [&](std::ostream& f) { write_report(f, r); });
    if (!opt_.trajectories.empty())
      emit_to(opt_.trajectories, [&](std::ostream& f) { io::write_trajectories(f, dc); });
    return 0;
  }

  void print_monge(const MongeResult& r) {
    if (!r.supports_disjoint) out_ << "warning: supports overlap\n";
    if (r.is_map) {
      out_ << "map\n";
      emit_to(opt_.out, [&](std::ostream& f) { io::write_map(f, r.map); });
    } else {
      out_ << "not a graph: source " << r.witness->source + 1 << " -> targets " << r.witness->target1 + 1 << ", "
           << r.witness->target2 + 1 << "\n";
    }
  }

  int monge_cmd() {
    const auto m = model();
    const auto [mu, nu] = measures();
    print_monge(monge_solve(*m, mu, nu));
    return 0;
  }

  void print_probe(const UniquenessProbe& p) {
    out_ << (p.unique ? "unique" : "not unique") << "\ntrials " << p.trials << "\n";
    if (!p.unique) {
      auto support = [&](const Eigen::MatrixXd& c) {
        std::ostringstream s;
        for (Index i = 0; i < c.rows(); ++i)
          for (Index j = 0; j < c.cols(); ++j)
            if (c(i, j) > 0.0) s << " (" << i + 1 << "," << j + 1 << ")";
        return s.str();
      };
      out_ << "support 1:" << support(p.first) << "\ncost 1 " << p.first_cost << "\n";
      out_ << "support 2:" << support(*p.second) << "\ncost 2 " << p.second_cost << "\n";
    }
  }

  int probe() {
    const auto m = model();
    const auto [mu, nu] = measures();
    print_probe(uniqueness_probe(*m, mu, nu, opt_.trials, opt_.seed));
    return 0;
  }

  int half_holder() {
    const HolderExperiment e = holder_sharpness_experiment(opt_.n, opt_.seed);
    out_ << "unique_matching " << (e.unique_matching ? "yes" : "no") << "\n";
    write_report(out_, e.report);
    const bool in_range = e.report.fitted_exponent >= 0.4 && e.report.fitted_exponent <= 0.65;
    out_ << "exponent_in_range " << (in_range ? "yes" : "no") << "\n";
    if (!opt_.out_dir.empty())
      emit_to("half_holder_trajectories.txt", [&](std::ostream& f) { io::write_trajectories(f, e.coupling); });
    return 0;
  }

  int crossing() {
    const CrossingExperiment e = crossing_experiment(opt_.count, opt_.seed);
    out_ << "samples " << e.samples.size() << "\nnegative " << e.negative << "\nkappa " << e.kappa
         << "\ncrossed_nulls_gain " << e.crossed_nulls_gain << "\n";
    return 0;
  }

  int null_cone() {
    const auto m = make_minkowski(1);
    auto ev = [](double t, double x) { return Event(t, Eigen::VectorXd::Constant(1, x)); };
    const DiscreteMeasure mu = make_measure({ev(0.0, -2.0), ev(0.5, -1.5)}, {0.5, 0.5});
    const DiscreteMeasure nu = make_measure({ev(1.0, -1.0), ev(1.5, -0.5)}, {0.5, 0.5});
    print_monge(monge_solve(*m, mu, nu));
    print_probe(uniqueness_probe(*m, mu, nu, opt_.trials, opt_.seed));
    return 0;
  }

 private:
  const Options& opt_;
  std::ostream& out_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Lorentzian optimal transport on discrete measures", "lorentz-ot"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--model", opt.model, "model file");
  app.add_option("--seed", opt.seed, "seed for randomized diagnostics");
  app.add_option("--out-dir", opt.out_dir, "directory for relative output paths");

  auto measure_opts = [&](CLI::App* sub) {
    sub->add_option("--mu", opt.mu, "source measure file")->required();
    sub->add_option("--nu", opt.nu, "target measure file")->required();
  };
  CLI::App* feasible = app.add_subcommand("feasible", "decide causal relatedness");
  measure_opts(feasible);
  feasible->add_option("--epsilon", opt.epsilon, "fattening radius")->check(CLI::NonNegativeNumber);
  feasible->add_option("--witness", opt.witness, "write the witness coupling here");

  CLI::App* solve_sub = app.add_subcommand("solve", "optimal plan and potentials");
  measure_opts(solve_sub);
  solve_sub->add_option("--out", opt.out, "plan file");

  CLI::App* interp = app.add_subcommand("interpolate", "displacement interpolation");
  interp->add_option("--plan", opt.plan, "plan file")->required();
  interp->add_option("--t", opt.t, "interpolation parameter")->required()->check(CLI::Range(0.0, 1.0));
  interp->add_option("--out", opt.out, "measure file");

  CLI::App* diagnose = app.add_subcommand("diagnose", "regularity report");
  diagnose->add_option("--plan", opt.plan, "plan file")->required();
  diagnose->add_option("--eps", opt.eps_time, "interior time margin");
  diagnose->add_option("--report", opt.report, "report file");
  diagnose->add_option("--trajectories", opt.trajectories, "trajectory dump");

  CLI::App* monge = app.add_subcommand("monge", "Monge map extraction");
  measure_opts(monge);
  monge->add_option("--out", opt.out, "map file");

  CLI::App* probe = app.add_subcommand("probe-uniqueness", "permutation probe for optimal plan uniqueness");
  measure_opts(probe);
  probe->add_option("--trials", opt.trials, "number of permuted re-solves")->check(CLI::NonNegativeNumber);

  CLI::App* repro = app.add_subcommand("repro", "reproduction experiments");
  repro->require_subcommand(1);
  CLI::App* holder = repro->add_subcommand("half-holder", "near-cancellation exponent experiment");
  holder->add_option("--n", opt.n, "number of atoms");
  CLI::App* crossing = repro->add_subcommand("crossing", "shortening gains of crossing minimizers");
  crossing->add_option("--count", opt.count, "number of random crossings");
  CLI::App* null_cone = repro->add_subcommand("null-cone", "non-unique plan on a null ray");
  null_cone->add_option("--trials", opt.trials, "number of permuted re-solves");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Runner runner(opt, out);
  try {
    if (*feasible) return runner.feasible();
    if (*solve_sub) return runner.solve_cmd();
    if (*interp) return runner.interpolate_cmd();
    if (*diagnose) return runner.diagnose();
    if (*monge) return runner.monge_cmd();
    if (*probe) return runner.probe();
    if (*holder) return runner.half_holder();
    if (*crossing) return runner.crossing();
    if (*null_cone) return runner.null_cone();
  } catch (const InfeasibleError& e) {
    out << "not related\n" << format_set(e.violating_set()) << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const RationalizationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace lorentz_ot::cli
