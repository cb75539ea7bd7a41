// fockmodel: command-line front end over the library.
//
// Exit codes: 0 computed, 1 input error, 2 undetermined or not converged
// (the report is still written).

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fockmodel/charfn.hpp"
#include "fockmodel/dilation.hpp"
#include "fockmodel/errors.hpp"
#include "fockmodel/factorization.hpp"
#include "fockmodel/io.hpp"
#include "fockmodel/model.hpp"
#include "fockmodel/multianalytic.hpp"
#include "fockmodel/rowcontraction.hpp"
#include "fockmodel/similarity.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace {

using namespace fockmodel;
using io::Json;

struct Options {
  std::string format = "human";
  std::string out;
  int deg = 4;
  int horizon = 200;
  double tol = 0.0;  // 0: not given
  std::string tuple;
  std::string subspace;
  std::string theta1, theta2, other1, other2;
};

struct Input {
  std::string role;
  std::string bytes;
};

struct Context {
  const Options& opt;
  Tolerance tol;
  std::vector<Input> inputs;
  bool undetermined = false;
};

bool is_input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::AlphabetMismatch:
    case ErrorKind::Precondition:
    case ErrorKind::NotCNC:
    case ErrorKind::NotInvariant:
    case ErrorKind::NotHermitian:
    case ErrorKind::NotPSD:
    case ErrorKind::DimensionGuard:
      return true;
    default:
      return false;
  }
}

Json verdict(Verdict v) {
  if (v == Verdict::Undetermined) return "undetermined";
  return v == Verdict::Yes;
}

Json load(Context& ctx, const std::string& role, const std::string& path) {
  std::string bytes = io::read_file(path);
  Json j = io::parse_text(bytes, path);
  ctx.inputs.push_back({role, std::move(bytes)});
  return j;
}

RowContraction load_tuple(Context& ctx, bool require_contraction) {
  io::TupleDocument doc = io::tuple_from_json(load(ctx, "tuple", ctx.opt.tuple));
  if (doc.tolerances && ctx.opt.tol == 0.0) ctx.tol = *doc.tolerances;
  return require_contraction ? RowContraction::checked(doc.matrices, ctx.tol)
                             : RowContraction::unchecked(doc.matrices, ctx.tol);
}

MultiAnalyticOp load_operator(Context& ctx, const std::string& role, const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::Parse, "--" + role + " is required");
  return io::operator_from_json(load(ctx, role, path));
}

Json coefficient_dump(const MultiAnalyticOp& op) {
  Json j = io::operator_to_json(op);
  j.erase("format");
  return j;
}

// ---- subcommands ----

Json cmd_validate(Context& ctx) {
  RowContraction t = load_tuple(ctx, false);
  const double margin = t.contraction_margin();
  return {{"n", t.n},
          {"d", t.d},
          {"contraction_margin", margin},
          {"row_contraction", margin >= -ctx.tol.eq_tol},
          {"finite", true}};
}

Json cmd_classify(Context& ctx) {
  RowContraction t = load_tuple(ctx, false);
  TupleClass c = classify_tuple(t, ctx.opt.horizon, ctx.tol);
  for (Verdict v : {c.pure_C0, c.C1, c.coisometric, c.cnc, c.power_bounded})
    if (v == Verdict::Undetermined && c.power_bounded != Verdict::No && c.coisometric != Verdict::No)
      ctx.undetermined = true;
  Json j{{"pure_C0", verdict(c.pure_C0)},   {"C1", verdict(c.C1)},
         {"coisometric", verdict(c.coisometric)}, {"cnc", verdict(c.cnc)},
         {"power_bounded", verdict(c.power_bounded)}, {"M", c.M},
         {"limit_residual", c.limit_residual}};
  if (t.contraction_margin() >= -ctx.tol.eq_tol) j["H_c_dim"] = compute_Hc(t, ctx.tol).dim();
  return j;
}

Json cmd_charfn(Context& ctx) {
  RowContraction t = load_tuple(ctx, true);
  const int N = ctx.opt.deg;
  DefectData dd = defects(t);
  MultiAnalyticOp th = char_fn(t, dd, N);
  Classification c = classify(th, N + 2, ctx.tol);
  return {{"defect_dim", dd.D.dim()},
          {"defect_star_dim", dd.D_star.dim()},
          {"defect_identity_residual", dd.identity_residual},
          {"truncation_classification",
           {{"inner", c.inner},
            {"outer", c.outer},
            {"purely_contractive", c.purely_contractive},
            {"unitary_constant", c.unitary_constant},
            {"inner_margin", c.inner_margin},
            {"inner_residual", c.inner_residual}}},
          {"intertwining_defect", intertwining_defect(th, N + 2)},
          {"theta", coefficient_dump(th)}};
}

Json cmd_dilate(Context& ctx) {
  RowContraction t = load_tuple(ctx, true);
  DilationSystem ds = build_dilation(t, ctx.opt.deg);
  return {{"K", ds.K},
          {"defect_dim", ds.defect_dim},
          {"nilpotency", ds.nilpotency},
          {"exact", ds.exact},
          {"L_dim", ds.L.dim()},
          {"L_star_dim", ds.L_star.dim()},
          {"residual_dim", ds.residual.dim()},
          {"residual_converged", ds.residual_converged},
          {"isometry_residual", ds.isometry_residual},
          {"dilation_residual", ds.dilation_residual},
          {"minimality_residual", ds.minimality_residual}};
}

Json cmd_wold(Context& ctx) {
  RowContraction t = load_tuple(ctx, true);
  DilationSystem ds = build_dilation(t, ctx.opt.deg);
  WoldResult w = wold(ds.V, ctx.tol, ctx.opt.horizon);
  if (!w.converged) ctx.undetermined = true;
  return {{"K", ds.K},
          {"residual_dim", w.residual.dim()},
          {"wandering_dim", w.wandering.dim()},
          {"iterations", w.iterations},
          {"converged", w.converged},
          {"leakage", w.leakage},
          {"identity_residual", w.identity_residual}};
}

Json cmd_model(Context& ctx) {
  RowContraction t = load_tuple(ctx, true);
  ModelOfT m = model_of_T(t, ctx.opt.deg);
  return {{"K", m.model.space.K},
          {"H_dim", m.model.space.H.dim()},
          {"defect_rank", m.model.space.defect_rank()},
          {"moment_margin", m.moment_margin},
          {"moment_residual", m.moment_residual},
          {"embedding_residual", m.embedding_residual},
          {"graph_identity_residual", m.model.space.graph_identity_residual},
          {"projection_residual", m.model.projection_residual},
          {"isometry_residual", m.model.isometry_residual},
          {"theta", coefficient_dump(m.theta)}};
}

Json factorization_json(const Factorization& f, const Tolerance& tol) {
  return {{"product_residual", f.product_residual},
          {"identity_residual", f.identity_residual},
          {"isometry_residual", f.isometry_residual},
          {"intertwining_residual", intertwining_residual(f, tol)},
          {"regular", f.regular},
          {"regularity_margin", f.regularity_margin},
          {"regularity_residual", f.regularity_residual}};
}

Json cmd_factorize_check(Context& ctx) {
  MultiAnalyticOp t1 = load_operator(ctx, "theta1", ctx.opt.theta1);
  MultiAnalyticOp t2 = load_operator(ctx, "theta2", ctx.opt.theta2);
  const int N = ctx.opt.deg;
  Factorization f = build_X(t1, t2, N, ctx.tol);
  RegularityShortcuts rs = regularity_shortcuts(t1, t2, N, ctx.tol);
  CuntzTriple ct = cuntz_triple(f, ctx.tol);
  Json j = factorization_json(f, ctx.tol);
  j["shortcuts"] = {{"inner_factor2", verdict(rs.inner_factor2)}, {"inner_theta_rule", verdict(rs.inner_theta_rule)},
                    {"rank_rule", verdict(rs.rank_rule)},         {"rank_theta", rs.rank_theta},
                    {"rank1", rs.rank1},                          {"rank2", rs.rank2}};
  j["cuntz"] = {{"C", ct.C}, {"E", ct.E}, {"F", ct.F}};
  return j;
}

Json cmd_invariant_to_factor(Context& ctx) {
  RowContraction t = load_tuple(ctx, true);
  if (ctx.opt.subspace.empty()) throw Error(ErrorKind::Parse, "--subspace is required");
  Subspace h1 = io::subspace_from_json(load(ctx, "subspace", ctx.opt.subspace), ctx.tol);
  if (h1.ambient() != t.d) throw Error(ErrorKind::ShapeMismatch, "subspace ambient dimension differs from d");
  SubspaceFactorization sf = factorization_from_subspace(t, h1, ctx.opt.deg);
  Json j = factorization_json(sf.factorization, ctx.tol);
  j["subspace_dim"] = h1.dim();
  j["Q_dim"] = sf.Q.dim();
  j["factor_product_residual"] = sf.product_residual;
  j["round_trip_checked"] = sf.round_trip_checked;
  j["round_trip_distance"] = sf.round_trip_distance;
  j["theta"] = coefficient_dump(sf.factorization.theta);
  j["theta1"] = coefficient_dump(sf.factorization.theta1);
  j["theta2"] = coefficient_dump(sf.factorization.theta2);
  return j;
}

Json cmd_factor_to_invariant(Context& ctx) {
  MultiAnalyticOp t1 = load_operator(ctx, "theta1", ctx.opt.theta1);
  MultiAnalyticOp t2 = load_operator(ctx, "theta2", ctx.opt.theta2);
  Factorization f = build_X(t1, t2, ctx.opt.deg, ctx.tol);
  ModelSubspaces ms = subspaces_from_factorization(f, ctx.tol);
  TriangulationCheck tc = factor_triangulation_check(f, ctx.tol);
  if (tc.A_coincides == Verdict::Undetermined || tc.B_coincides == Verdict::Undetermined) ctx.undetermined = true;
  Json j = factorization_json(f, ctx.tol);
  j["model_K"] = ms.model.space.K;
  j["H_dim"] = ms.model.space.H.dim();
  j["H1_dim"] = ms.H1.dim();
  j["H2_dim"] = ms.H2.dim();
  j["invariance_residual"] = ms.invariance_residual;
  j["complement_residual"] = ms.complement_residual;
  j["membership_residual"] = ms.membership_residual;
  j["triangulation"] = {{"A_coincides", verdict(tc.A_coincides)},
                        {"B_coincides", verdict(tc.B_coincides)},
                        {"A_residual", tc.A_residual},
                        {"B_residual", tc.B_residual},
                        {"subspace_nontrivial", tc.subspace_nontrivial},
                        {"factorization_nontrivial", tc.factorization_nontrivial},
                        {"nontriviality_agrees", tc.nontriviality_agrees}};
  j["H1"] = io::matrix_to_json(ms.H1.basis());
  return j;
}

Json cmd_compare_factors(Context& ctx) {
  MultiAnalyticOp a1 = load_operator(ctx, "theta1", ctx.opt.theta1);
  MultiAnalyticOp a2 = load_operator(ctx, "theta2", ctx.opt.theta2);
  MultiAnalyticOp b1 = load_operator(ctx, "other-theta1", ctx.opt.other1);
  MultiAnalyticOp b2 = load_operator(ctx, "other-theta2", ctx.opt.other2);
  const int N = ctx.opt.deg;
  Factorization f = build_X(a1, a2, N, ctx.tol);
  Factorization g = build_X(b1, b2, N, ctx.tol);
  if (coefficient_distance(f.theta, g.theta, N) > ctx.tol.eq_tol)
    throw Error(ErrorKind::Precondition, "the two factorizations have different products");
  try {
    FactorComparison c = compare_factorizations(f, g, ctx.tol);
    return {{"relation", to_string(c.relation)},
            {"psi_unitary_constant", c.psi_unitary_constant},
            {"solve_residual", c.solve_residual},
            {"product_residual", c.product_residual},
            {"psi", coefficient_dump(c.psi)}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotComparable) throw;
    return {{"relation", "not comparable"}};
  }
}

Json cmd_inner_outer(Context& ctx) {
  RowContraction t = load_tuple(ctx, true);
  InnerOuterSplit sp = inner_outer_split(t, ctx.opt.deg, ctx.tol);
  Triangulation tri = triangulate_c0_c1(t, ctx.opt.horizon, ctx.tol);
  return {{"H0_dim", sp.H0.dim()},
          {"H1_dim", sp.H1.dim()},
          {"kernel_dim", sp.kernel_dim},
          {"H0_distance_to_triangulation", subspace_distance(sp.H0, tri.first)},
          {"H1_distance_to_triangulation", subspace_distance(sp.H1, tri.second)},
          {"product_residual", sp.factorization.product_residual},
          {"H0", io::matrix_to_json(sp.H0.basis())},
          {"H1", io::matrix_to_json(sp.H1.basis())}};
}

Json cmd_similarity(Context& ctx) {
  RowContraction t = load_tuple(ctx, false);
  SimilarityReport r = similarity_to_cuntz(t, ctx.opt.horizon, ctx.tol);
  if (r.similar == Verdict::Undetermined) ctx.undetermined = true;
  Json j{{"similar", verdict(r.similar)},
         {"reason", r.reason},
         {"orientation", r.orientation},
         {"achieved", r.achieved},
         {"injective", r.injective},
         {"power_bounded", r.power_bounded},
         {"c", r.c},
         {"a", r.a},
         {"b", r.b},
         {"cond_X", r.cond_X},
         {"fixed_point_residual", r.fixed_point_residual},
         {"intertwining_residual", r.intertwining_residual},
         {"coisometry_residual", r.coisometry_residual},
         {"isometry_residual", r.isometry_residual}};
  if (r.P.size()) j["P"] = io::matrix_to_json(r.P);
  if (r.X.size()) j["X"] = io::matrix_to_json(r.X);
  if (!r.W.empty()) {
    Json w = Json::array();
    for (const auto& wi : r.W) w.push_back(io::matrix_to_json(wi));
    j["W"] = std::move(w);
  }
  if (t.contraction_margin() >= -ctx.tol.eq_tol && compute_Hc(t, ctx.tol).dim() == 0) {
    const int N = std::max(ctx.opt.deg, 4);
    CharFnCriterion c = invertible_charfn_criterion(t, N, {N / 4, N / 2, N});
    j["charfn_criterion"] = {{"invertible", verdict(c.invertible)}, {"degrees", c.degrees}, {"sigma_mins", c.sigma_mins}};
    if (c.theta_inv_norm) j["theta_inv_norm"] = *c.theta_inv_norm;
  }
  return j;
}

// ---- reports ----

void human(std::ostream& os, const Json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) human(os, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
    return;
  }
  std::string v = j.is_string() ? j.get<std::string>() : j.dump();
  if (v.size() > 96) v = v.substr(0, 93) + "...";
  os << std::left << std::setw(40) << prefix << ' ' << v << '\n';
}

std::string render(const Json& report, const std::string& format) {
  std::ostringstream os;
  if (format == "machine") {
    os << report.dump(2) << '\n';
  } else {
    human(os, report, "");
  }
  return os.str();
}

int emit(const Options& opt, const Json& report) {
  const std::string text = render(report, opt.format);
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << opt.out << '\n';
      return 1;
    }
    f << text;
  }
  return 0;
}

Json header(const std::string& command, const Context& ctx) {
  std::uint64_t h = io::fnv1a64("");
  Json roles = Json::array();
  for (const auto& in : ctx.inputs) {
    h = io::fnv1a64(in.role + '\0', h);
    h = io::fnv1a64(in.bytes, h);
    roles.push_back({{"role", in.role}, {"digest", "fnv1a64:" + io::hex64(io::fnv1a64(in.bytes))}});
  }
  Json j;
  j["schema"] = io::kReportSchema;
  j["command"] = command;
  j["inputs"] = std::move(roles);
  j["inputs_digest"] = "fnv1a64:" + io::hex64(h);
  j["tolerances"] = {{"rank_tol", ctx.tol.rank_tol}, {"eq_tol", ctx.tol.eq_tol}};
  j["truncation"] = {{"deg", ctx.opt.deg}, {"horizon", ctx.opt.horizon}};
  return j;
}

int run(const std::string& command, const std::function<Json(Context&)>& fn, const Options& opt) {
  Context ctx{opt, Tolerance::from_env(), {}, false};
  if (opt.tol != 0.0) ctx.tol.eq_tol = opt.tol;
  ctx.tol.validate();
  Json result;
  std::string status = "computed";
  try {
    result = fn(ctx);
    if (ctx.undetermined) status = "undetermined";
  } catch (const Error& e) {
    if (is_input_error(e.kind())) throw;
    status = "error";
    result = {{"kind", to_string(e.kind())}, {"message", e.what()}};
  }
  Json report = header(command, ctx);
  report["status"] = status;
  report["result"] = std::move(result);
  int rc = emit(opt, report);
  if (rc) return rc;
  return status == "computed" ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  if (openblas_set_num_threads) openblas_set_num_threads(1);

  CLI::App app{"Row contractions, characteristic functions and their models"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&opt](CLI::App* sc, bool tuple) {
    sc->add_option("-N,--deg", opt.deg, "Truncation degree")->check(CLI::Range(0, 64));
    sc->add_option("--tol", opt.tol, "Equality tolerance")->check(CLI::PositiveNumber);
    sc->add_option("--horizon", opt.horizon, "Iteration horizon")->check(CLI::Range(1, 100000));
    sc->add_option("--out", opt.out, "Report path (default stdout)");
    sc->add_option("--format", opt.format, "human or machine")->check(CLI::IsMember({"human", "machine"}));
    if (tuple) sc->add_option("tuple", opt.tuple, "Tuple document (JSON)")->required()->check(CLI::ExistingFile);
  };
  auto factors = [&opt](CLI::App* sc) {
    sc->add_option("--theta1", opt.theta1, "Right factor Theta_1")->required()->check(CLI::ExistingFile);
    sc->add_option("--theta2", opt.theta2, "Left factor Theta_2")->required()->check(CLI::ExistingFile);
  };

  using Handler = Json (*)(Context&);
  std::vector<std::pair<std::string, Handler>> handlers;
  auto add = [&](const std::string& name, const std::string& help, bool tuple, Handler h) {
    CLI::App* sc = app.add_subcommand(name, help);
    common(sc, tuple);
    handlers.emplace_back(name, h);
    return sc;
  };

  add("validate", "Parse and check a tuple document", true, cmd_validate);
  add("classify", "Classify a tuple (pure, C1, coisometric, c.n.c., power bounded)", true, cmd_classify);
  add("charfn", "Characteristic function coefficients", true, cmd_charfn);
  add("dilate", "Truncated minimal isometric dilation", true, cmd_dilate);
  add("wold", "Wold decomposition of the dilation", true, cmd_wold);
  add("model", "Functional model and moment check", true, cmd_model);
  factors(add("factorize-check", "Regularity of Theta = Theta_2 Theta_1", false, cmd_factorize_check));
  add("invariant-to-factor", "Factorization from a joint invariant subspace", true, cmd_invariant_to_factor)
      ->add_option("--subspace", opt.subspace, "Subspace document")
      ->required()
      ->check(CLI::ExistingFile);
  factors(add("factor-to-invariant", "Invariant subspace of the model from a factorization", false,
              cmd_factor_to_invariant));
  CLI::App* cmp = add("compare-factors", "Compare two factorizations of the same Theta", false, cmd_compare_factors);
  factors(cmp);
  cmp->add_option("--other-theta1", opt.other1, "Right factor of the second factorization")
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("--other-theta2", opt.other2, "Left factor of the second factorization")
      ->required()
      ->check(CLI::ExistingFile);
  add("inner-outer", "Inner-outer split pulled back to H", true, cmd_inner_outer);
  add("similarity", "Similarity to a Cuntz row isometry", true, cmd_similarity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  for (const auto& [name, h] : handlers) {
    if (!app.got_subcommand(name)) continue;
    try {
      return run(name, h, opt);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
