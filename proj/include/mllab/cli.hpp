#pragma once

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mllab/harness.hpp"
#include "mllab/io.hpp"
#include "mllab/olsen.hpp"

namespace mllab::cli {

// Exit codes: 0 ok, 2 input parse failure, 3 invalid parameters/flags,
// 4 guarantee or fixture-assertion failure.
inline constexpr int kOk = 0;
inline constexpr int kParseError = 2;
inline constexpr int kBadParams = 3;
inline constexpr int kGuaranteeFailure = 4;

namespace detail {

inline double parse_real(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return kInf;
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::domain_error("not a number: " + s);
  return v;
}

inline StepFunction load_step(const std::string& path) {
  return step_function_from_json(load_json_file(path));
}

inline const char* kSuiteHelp =
    "Suites and the statement each one checks:\n"
    "  indicator        ||chi_Q||_{M^p_{q,r}} = (q/r)^{1/r}|Q|^{1/p} (exact indicator norm)\n"
    "  holder           Hoelder inequality for Lorentz quasi-norms\n"
    "  embedding        Morrey-Lorentz embeddings in r and q (Ragusa)\n"
    "  fatou            Fatou property of the Morrey-Lorentz quasi-norm\n"
    "  maximal-lpq      Lorentz boundedness of M^(eta,theta), eta < p\n"
    "  maximal-mpqr     Morrey-Lorentz boundedness of the Hardy-Littlewood M\n"
    "  fefferman-stein  vector-valued (Fefferman-Stein) maximal inequality\n"
    "  synthesis        atomic synthesis bound in M^p_{q,r}\n"
    "  decomposition    Calderon-Zygmund atomic decomposition guarantees\n"
    "  atom-decay       I_alpha decay on cancelling atoms over rings 2^k Q\n"
    "  frac-lower       lower bound I_alpha chi_Q >= C l(Q)^alpha on Q\n"
    "  adams            Adams-type bound for I_alpha on Morrey-Lorentz spaces\n"
    "  hls              Hardy-Littlewood-Sobolev inequality (Lebesgue baseline)\n"
    "  olsen            Olsen inequality ||g I_alpha f|| <= C ||g||_W ||f||\n"
    "  fefferman-phong  Fefferman-Phong ratio (report-only; needs n >= 3)\n"
    "  heat-domination  |e^{t Delta} f| <= C M f pointwise";

}  // namespace detail

inline int run(std::vector<std::string> args) {
  CLI::App app{"Morrey-Lorentz norms, maximal operators, fractional integrals and "
               "atomic decompositions on exact dyadic step functions"};
  app.require_subcommand(1);

  // ---- norm ----------------------------------------------------------
  auto* norm = app.add_subcommand("norm", "Print a quasi-norm of a step function");
  std::string norm_space, norm_p, norm_q, norm_r = "1", norm_input;
  norm->add_option("--space", norm_space, "lorentz | morrey-lorentz | weak-morrey")->required();
  norm->add_option("--p", norm_p)->required();
  norm->add_option("--q", norm_q)->required();
  norm->add_option("--r", norm_r, "third exponent (morrey-lorentz only; 'inf' allowed)");
  norm->add_option("--input", norm_input, "step-function JSON file")->required();

  // ---- maximal -------------------------------------------------------
  auto* maxc = app.add_subcommand("maximal", "Apply M^(eta,theta) on an eval grid");
  std::string max_eta = "1", max_theta = "1", max_input, max_output;
  int max_eval = 0;
  maxc->add_option("--eta", max_eta);
  maxc->add_option("--theta", max_theta, "'inf' allowed");
  maxc->add_option("--eval-level", max_eval)->required();
  maxc->add_option("--input", max_input)->required();
  maxc->add_option("--output", max_output, "output step-function JSON")->required();

  // ---- fracint -------------------------------------------------------
  auto* frac = app.add_subcommand("fracint", "Apply the fractional integral I_alpha");
  double frac_alpha = 0.5;
  int frac_eval = 0, frac_window = 2;
  std::string frac_input, frac_output;
  frac->add_option("--alpha", frac_alpha)->required();
  frac->add_option("--eval-level", frac_eval)->required();
  frac->add_option("--window", frac_window, "dyadic window levels above the support box");
  frac->add_option("--input", frac_input)->required();
  frac->add_option("--output", frac_output)->required();

  // ---- heat ----------------------------------------------------------
  auto* heat = app.add_subcommand("heat", "Heat extension / heat-maximal norm");
  std::vector<double> heat_ts;
  int heat_eval = -1, heat_window = 2;
  std::string heat_input, heat_output, heat_p, heat_q, heat_r;
  heat->add_option("--t", heat_ts, "evaluation times (default: geometric grid 4^-j)");
  heat->add_option("--eval-level", heat_eval);
  heat->add_option("--window", heat_window);
  heat->add_option("--input", heat_input)->required();
  heat->add_option("--output", heat_output, "write e^{t Delta} f (single --t)");
  heat->add_option("--p", heat_p, "with --q/--r: print the heat-maximal Morrey-Lorentz norm");
  heat->add_option("--q", heat_q);
  heat->add_option("--r", heat_r);

  // ---- decompose -----------------------------------------------------
  auto* dec = app.add_subcommand("decompose", "Calderon-Zygmund atomic decomposition");
  int dec_K = 0;
  double dec_v = 1.0;
  std::string dec_input, dec_output, dec_report;
  dec->add_option("--K", dec_K, "moment cancellation degree")->required();
  dec->add_option("--v", dec_v, "aggregation exponent in (0,1]");
  dec->add_option("--input", dec_input)->required();
  dec->add_option("--output", dec_output, "atom-family JSON")->required();
  dec->add_option("--report", dec_report, "residual + guarantees JSON");

  // ---- synthesize ----------------------------------------------------
  auto* syn = app.add_subcommand("synthesize", "Sum an atom family into a step function");
  std::string syn_input, syn_output;
  syn->add_option("--input", syn_input, "atom-family JSON")->required();
  syn->add_option("--output", syn_output)->required();

  // ---- verify --------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "Run a property suite");
  ver->footer(detail::kSuiteHelp);
  std::string ver_suite, ver_mode = "assert", ver_report, ver_fixtures;
  int ver_trials = -1;
  std::uint64_t ver_seed = 0;
  bool ver_seed_set = false;
  ver->add_option("--suite", ver_suite)->required();
  ver->add_option("--trials", ver_trials, "override the canonical trial count");
  ver->add_option("--seed", ver_seed)->each([&](const std::string&) { ver_seed_set = true; });
  ver->add_option("--mode", ver_mode, "assert | record");
  ver->add_option("--report", ver_report, "write the trial CSV here");
  ver->add_option("--fixtures", ver_fixtures, "fixture file (default $MLLAB_FIXTURES or ./fixtures.json)");

  // ---- estimate ------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "One-shot inequality ratio on given inputs");
  std::string est_check, est_input, est_input2;
  double est_alpha = 0.5, est_p = 1.5, est_q = 1.0;
  std::string est_p1 = "2", est_q1 = "2", est_p2 = "2", est_q2 = "2";
  int est_eval = 6;
  est->add_option("--check", est_check, "holder | olsen | adams | hls | fefferman-phong")->required();
  est->add_option("--input", est_input)->required();
  est->add_option("--input2", est_input2, "second input (holder/olsen/fefferman-phong)");
  est->add_option("--alpha", est_alpha);
  est->add_option("--p", est_p);
  est->add_option("--q", est_q);
  est->add_option("--p1", est_p1);
  est->add_option("--q1", est_q1);
  est->add_option("--p2", est_p2);
  est->add_option("--q2", est_q2);
  est->add_option("--eval-level", est_eval);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kBadParams;
  }

  try {
    if (*norm) {
      const StepFunction f = detail::load_step(norm_input);
      const double p = detail::parse_real(norm_p), q = detail::parse_real(norm_q);
      double value = 0.0;
      if (norm_space == "lorentz")
        value = lorentz_norm(f, LorentzParams(p, q));
      else if (norm_space == "morrey-lorentz")
        value = morrey_lorentz_norm(f, MorreyLorentzParams(p, q, detail::parse_real(norm_r)));
      else if (norm_space == "weak-morrey")
        value = weak_morrey_norm(f, p, q);
      else
        throw std::domain_error("unknown --space: " + norm_space);
      std::cout << fmt_double(value) << "\n";
      return kOk;
    }

    if (*maxc) {
      const StepFunction f = detail::load_step(max_input);
      const StepFunction mf = maximal(
          f, MaximalParams(detail::parse_real(max_eta), detail::parse_real(max_theta)), max_eval);
      save_json_file(max_output, step_function_to_json(mf));
      return kOk;
    }

    if (*frac) {
      const StepFunction f = detail::load_step(frac_input);
      const StepFunction out =
          frac_integral(f, FracIntegralParams(frac_alpha), frac_eval, frac_window);
      save_json_file(frac_output, step_function_to_json(out));
      return kOk;
    }

    if (*heat) {
      const StepFunction f = detail::load_step(heat_input);
      const int eval = heat_eval >= 0 ? heat_eval : f.level + 2;
      if (!heat_p.empty()) {
        if (heat_q.empty() || heat_r.empty())
          throw std::domain_error("heat norm needs --p, --q and --r");
        HeatParams hp = HeatParams::default_grid();
        if (!heat_ts.empty()) {
          hp.t_grid = heat_ts;
          std::sort(hp.t_grid.begin(), hp.t_grid.end());
        }
        hp.quadrature_level = eval - f.level;
        hp.validate();
        const MorreyLorentzParams mp(detail::parse_real(heat_p), detail::parse_real(heat_q),
                                     detail::parse_real(heat_r));
        std::cout << fmt_double(heat_maximal_norm(f, hp, mp)) << "\n";
        return kOk;
      }
      if (heat_ts.size() != 1 || heat_output.empty())
        throw std::domain_error("heat extension needs exactly one --t and an --output");
      save_json_file(heat_output,
                     step_function_to_json(heat_extension(f, heat_ts[0], eval, heat_window)));
      return kOk;
    }

    if (*dec) {
      const StepFunction f = detail::load_step(dec_input);
      const DecompositionResult res = decompose(f, dec_K, dec_v);
      const DecompositionGuarantees g = verify_decomposition(f, res);
      save_json_file(dec_output, atom_family_to_json(res.family));
      if (!dec_report.empty()) {
        json rep{{"residual", step_function_to_json(res.residual)},
                 {"k_min", res.k_min},
                 {"k_max", res.k_max},
                 {"guarantees",
                  {{"reconstruction_error", g.reconstruction_error},
                   {"max_atom_excess", g.max_atom_excess},
                   {"max_moment_residual", g.max_moment_residual},
                   {"lambda_bound_constant", g.lambda_bound_constant},
                   {"pointwise_bound_constant", g.pointwise_bound_constant}}}};
        save_json_file(dec_report, rep);
      }
      if (g.reconstruction_error > 1e-10 * f.sup_norm()) {
        std::cerr << "guarantee violated: reconstruction_error = "
                  << fmt_double(g.reconstruction_error) << "\n";
        return kGuaranteeFailure;
      }
      if (g.max_atom_excess > 1e-12) {
        std::cerr << "guarantee violated: max_atom_excess = " << fmt_double(g.max_atom_excess)
                  << "\n";
        return kGuaranteeFailure;
      }
      if (g.max_moment_residual > 1e-10) {
        std::cerr << "guarantee violated: max_moment_residual = "
                  << fmt_double(g.max_moment_residual) << "\n";
        return kGuaranteeFailure;
      }
      std::cout << "atoms=" << res.family.atoms.size()
                << " reconstruction_error=" << fmt_double(g.reconstruction_error) << "\n";
      return kOk;
    }

    if (*syn) {
      const AtomFamily fam = atom_family_from_json(load_json_file(syn_input));
      save_json_file(syn_output, step_function_to_json(synthesize(fam)));
      return kOk;
    }

    if (*ver) {
      TrialSpec spec = default_spec(ver_suite);
      if (ver_trials > 0) spec.trials = ver_trials;
      if (ver_seed_set) spec.seed = ver_seed;
      if (ver_mode != "assert" && ver_mode != "record")
        throw std::domain_error("unknown --mode: " + ver_mode);
      FixtureStore store(ver_fixtures.empty() ? FixtureStore::default_path() : ver_fixtures);
      const VerifyReport rep =
          run_suite(spec, ver_mode == "record" ? RunMode::record_mode : RunMode::assert_mode, store);
      if (!ver_report.empty()) {
        std::ofstream out(ver_report);
        if (!out) throw std::runtime_error("cannot write " + ver_report);
        out << rep.to_csv();
      }
      std::cout << "suite=" << spec.suite << " trials=" << spec.trials << " seed=" << spec.seed
                << " rows=" << rep.rows.size() << " max_ratio=" << fmt_double(rep.max_ratio)
                << " median_ratio=" << fmt_double(rep.median_ratio) << "\n";
      if (!rep.passed) {
        std::cerr << "FAIL: " << rep.failure << "\n";
        return kGuaranteeFailure;
      }
      std::cout << "PASS\n";
      return kOk;
    }

    if (*est) {
      const StepFunction f = detail::load_step(est_input);
      auto need2 = [&]() {
        if (est_input2.empty()) throw std::domain_error("--input2 required for " + est_check);
        return detail::load_step(est_input2);
      };
      RatioReport rep;
      if (est_check == "holder") {
        rep = check_holder(f, need2(),
                           HolderSplit{detail::parse_real(est_p1), detail::parse_real(est_q1),
                                       detail::parse_real(est_p2), detail::parse_real(est_q2)});
      } else if (est_check == "olsen") {
        OlsenParams op;
        op.alpha = est_alpha;
        op.dim = f.dim;
        op.r0 = 1.0 / (1.0 / op.q0 + 1.0 / op.p0 - est_alpha / f.dim);
        op.r1 = op.p1 * op.r0 / op.p0;
        op.r2 = op.p2 * op.r0 / op.p0;
        const OlsenReport orep = check_olsen(f, need2(), op, est_eval);
        rep = RatioReport{orep.lhs, orep.rhs, orep.ratio};
      } else if (est_check == "adams") {
        AdamsParams ap;
        ap.alpha = est_alpha;
        ap.dim = f.dim;
        ap.s = 1.0 / (1.0 / ap.p - est_alpha / f.dim);
        ap.t = ap.q * ap.s / ap.p;
        ap.u = ap.r * ap.s / ap.p;
        rep = check_adams(f, ap, est_eval);
      } else if (est_check == "hls") {
        rep = check_hls(f, est_alpha, est_p, est_eval);
      } else if (est_check == "fefferman-phong") {
        const FeffermanPhongReport fr = check_fefferman_phong(f, need2(), est_q);
        rep = RatioReport{fr.lhs, fr.rhs, fr.ratio};
        if (fr.degenerate) std::cout << "note=degenerate-gradient\n";
      } else {
        throw std::domain_error("unknown --check: " + est_check);
      }
      std::cout << "lhs=" << fmt_double(rep.lhs) << " rhs=" << fmt_double(rep.rhs)
                << " ratio=" << fmt_double(rep.ratio) << "\n";
      return kOk;
    }
  } catch (const json::parse_error& e) {
    std::cerr << "input parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadParams;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadParams;
  }
  return kBadParams;
}

}  // namespace mllab::cli
