// hofa: command-line front end. Every command prints one JSON document on
// stdout; checks that fail print {"violation": ...} and exit 1, bad input
// prints {"error": ...} on stderr and exits 2.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hofa/hofa.hpp"

using json = nlohmann::json;
using namespace hofa;

namespace {

struct Globals {
  unsigned p = 2;
  u64 seed = 1;
  u64 budget = kDefaultBudget;
  bool json = false;
};

struct Violation : std::runtime_error {
  json record;
  explicit Violation(json r) : std::runtime_error("violation"), record(std::move(r)) {}
};

// An argument naming a readable file is replaced by the file's lines joined
// with `sep`, skipping blanks and '#' comments.
std::string arg_or_file(const std::string& s, char sep) {
  std::error_code ec;
  if (s.empty() || !std::filesystem::is_regular_file(s, ec)) return s;
  std::ifstream in(s);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    if (!out.empty()) out += sep;
    out += line.substr(b, e - b + 1);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Point parse_point(unsigned p, const std::string& s) {
  Point x;
  for (const auto& t : split(s, ',')) {
    const long v = std::stol(t);
    x.push_back(static_cast<unsigned>(((v % static_cast<long>(p)) + p) % p));
  }
  return x;
}

std::vector<Point> parse_points(unsigned p, const std::string& s) {
  std::vector<Point> out;
  for (const auto& t : split(s, ';')) out.push_back(parse_point(p, t));
  return out;
}

std::vector<Signature> parse_signatures(const std::string& s) {
  std::vector<Signature> out;
  for (const auto& t : split(s, ';')) {
    const auto dk = split(t, ',');
    if (dk.size() != 2) throw std::invalid_argument("signature must read d,k: '" + t + "'");
    out.push_back({static_cast<unsigned>(std::stoul(dk[0])), static_cast<unsigned>(std::stoul(dk[1]))});
  }
  return out;
}

PolyFactor load_factor(const Globals& g, const std::string& arg, unsigned n) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    return PolyFactor::parse(g.p, n, ss.str());
  }
  std::string text;
  for (const auto& t : split(arg, ';')) text += t + "\n";
  return PolyFactor::parse(g.p, n, text);
}

json witness_json(const UniformityWitness& w) {
  return {{"lambda", w.lambda}, {"d", w.d}, {"value", w.value}};
}

json certificate_json(const UniformityCertificate& c) {
  json j{{"epsilon", c.epsilon}, {"certified", c.certified}, {"max_value", c.max_value}, {"combinations", c.combinations}};
  j["witnesses"] = json::array();
  for (const auto& w : c.witnesses) j["witnesses"].push_back(witness_json(w));
  if (c.violation) j["violation"] = witness_json(*c.violation);
  return j;
}

json group_json(const TupleGroup& G) {
  json gens = json::array();
  for (const auto& v : G.generators()) gens.push_back(v);
  return {{"modulus", G.modulus()}, {"arity", G.arity()}, {"order", G.size()}, {"generators", gens}};
}

json factor_json(const PolyFactor& B) {
  json polys = json::array();
  for (const auto& P : B.polys()) polys.push_back(to_string(P));
  return {{"polys", polys}, {"degrees", B.degrees()}, {"depths", B.depths()}};
}

json gowers_json(const GowersResult& r) {
  return {{"norm", r.norm}, {"norm_pow_2d", r.norm_pow}, {"method", r.method}, {"budget_used", r.budget_used}};
}

void emit(const Globals& g, const json& j) { std::cout << (g.json ? j.dump() : j.dump(2)) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"higher-order Fourier analysis toolkit over F_p^n"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--p", g.p, "prime")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--budget", g.budget, "work budget")->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "compact single-line JSON");

  std::function<json()> action;
  auto set = [&](CLI::App* sub, std::function<json()> f) { sub->callback([&action, f] { action = f; }); };

  // ---- poly
  auto* poly = app.add_subcommand("poly", "non-classical polynomials")->require_subcommand(1);
  std::string poly_s, x_s, h_s, values_s;
  unsigned n = 0, d = 1, k = 0;
  u64 mc = 0;

  auto* p_eval = poly->add_subcommand("eval", "evaluate at a point");
  p_eval->add_option("--poly", poly_s)->required();
  p_eval->add_option("--x", x_s, "point, e.g. 1,2")->required();
  set(p_eval, [&] {
    const Point x = parse_point(g.p, x_s);
    const NCPoly P = parse_poly(g.p, poly_s, static_cast<unsigned>(x.size()));
    return json{{"poly", to_string(P)}, {"x", x}, {"value", P.eval(x).str()}};
  });

  auto* p_interp = poly->add_subcommand("interp", "interpolate a value table");
  p_interp->add_option("--values", values_s, "comma-separated torus values in point order")->required();
  p_interp->add_option("--n", n)->required();
  set(p_interp, [&] {
    std::vector<TorusValue> vals;
    std::size_t col = 0;
    for (const auto& t : split(arg_or_file(values_s, ','), ',')) {
      vals.push_back(TorusValue::parse(g.p, t, col));
      col += t.size() + 1;
    }
    const NCPoly P = interpolate(FunctionTable::from_values(g.p, n, vals));
    return json{{"poly", to_string(P)}, {"degree", P.degree()}, {"depth", P.depth()}};
  });

  auto* p_deriv = poly->add_subcommand("deriv", "additive derivatives");
  p_deriv->add_option("--poly", poly_s)->required();
  p_deriv->add_option("--dirs", h_s, "directions h_1;..;h_t, e.g. 1,0;0,1")->required();
  p_deriv->add_option("--x", x_s, "evaluate D_h1..D_ht P at x");
  set(p_deriv, [&] {
    const auto hs = parse_points(g.p, h_s);
    const NCPoly P = parse_poly(g.p, poly_s, static_cast<unsigned>(hs.front().size()));
    json j{{"poly", to_string(P)}, {"h", hs}};
    if (!x_s.empty()) {
      const Point x = parse_point(g.p, x_s);
      j["x"] = x;
      j["value"] = partial_derivative_eval(P, x, hs).str();
    } else if (hs.size() == 1) {
      j["derivative"] = to_string(additive_derivative(P, hs.front()));
    } else {
      j["value"] = derivative_poly_eval(P, hs).str();
    }
    return j;
  });

  auto gowers_setup = [&](CLI::App* sub) {
    sub->add_option("--poly", poly_s)->required();
    sub->add_option("--d", d, "norm order")->required()->check(CLI::PositiveNumber);
    sub->add_option("--mc", mc, "Monte Carlo samples instead of exact enumeration");
    set(sub, [&] {
      const NCPoly P = parse_poly(g.p, poly_s);
      if (mc > 0) {
        const McEstimate e = gowers_norm_mc(P, d, mc, g.seed);
        return json{{"norm", std::pow(std::max(e.estimate, 0.0), 1.0 / std::pow(2.0, d))},
                    {"norm_pow_2d", e.estimate},
                    {"std_error", e.std_error},
                    {"samples", e.samples},
                    {"method", "monte-carlo"}};
      }
      return gowers_json(gowers_norm_exact(P, d, g.budget));
    });
  };
  gowers_setup(poly->add_subcommand("gowers", "Gowers norm of e(P)"));
  gowers_setup(app.add_subcommand("gowers", "Gowers norm of e(P)"));

  auto* p_bias = poly->add_subcommand("bias", "|E e(P)|");
  p_bias->add_option("--poly", poly_s)->required();
  set(p_bias, [&] {
    const NCPoly P = parse_poly(g.p, poly_s);
    return json{{"poly", to_string(P)}, {"bias", bias(P, g.budget)}};
  });

  // ---- homog
  auto* homog = app.add_subcommand("homog", "homogeneous polynomials")->require_subcommand(1);
  auto* h_sigma = homog->add_subcommand("sigma", "the scaling constant of degree d, depth k");
  h_sigma->add_option("--d", d)->required();
  h_sigma->add_option("--k", k);
  set(h_sigma, [&] {
    const CyclicInt s = teichmuller_sigma(g.p, d, k);
    return json{{"p", g.p}, {"d", d}, {"k", k}, {"sigma", s.value()}, {"modulus", s.modulus()}};
  });

  auto* h_check = homog->add_subcommand("check", "test P(ζx) = σ P(x)");
  h_check->add_option("--poly", poly_s)->required();
  set(h_check, [&] {
    const NCPoly P = parse_poly(g.p, poly_s);
    const auto w = is_homogeneous(P, g.budget);
    json j{{"poly", to_string(P)}, {"homogeneous", w.homogeneous}, {"degree", P.degree()}, {"depth", P.depth()},
           {"sigma", w.sigma.value()}};
    if (w.counterexample) j["counterexample"] = *w.counterexample;
    return j;
  });

  auto* h_basis = homog->add_subcommand("basis", "univariate homogeneous basis h_0..h_d");
  h_basis->add_option("--d", d)->required();
  set(h_basis, [&] {
    const HomogeneousBasis basis(g.p, d);
    json els = json::array();
    for (const auto& e : basis.elements())
      els.push_back({{"degree", e.degree},
                     {"depth", e.depth},
                     {"poly", to_string(e.poly)},
                     {"sigma", e.sigma.value()},
                     {"homogeneous", is_homogeneous(e.poly, g.budget).homogeneous}});
    return json{{"p", g.p}, {"elements", els}};
  });

  auto* h_dec = homog->add_subcommand("decompose", "write P as a sum of homogeneous polynomials");
  h_dec->add_option("--poly", poly_s)->required();
  set(h_dec, [&] {
    const NCPoly P = parse_poly(g.p, poly_s);
    const auto comps = homogeneous_decompose(P);
    NCPoly sum(P.prime(), P.dim());
    json cs = json::array();
    bool all_h = true;
    for (const auto& c : comps) {
      sum = sum + static_cast<i64>(c.coefficient) * c.poly;
      const bool h = is_homogeneous(c.poly, g.budget).homogeneous;
      all_h = all_h && h;
      cs.push_back({{"coefficient", c.coefficient}, {"poly", to_string(c.poly)}, {"homogeneous", h}});
    }
    const bool exact = sum == P;
    json j{{"poly", to_string(P)}, {"components", cs}, {"exact", exact}, {"all_homogeneous", all_h}};
    if (!exact || !all_h) throw Violation({{"check", "homogeneous decomposition"}, {"report", j}});
    return j;
  });

  auto* h_sample = homog->add_subcommand("sample", "random homogeneous polynomial of degree d, depth k");
  h_sample->add_option("--d", d)->required();
  h_sample->add_option("--k", k);
  h_sample->add_option("--n", n)->required();
  set(h_sample, [&] {
    const NCPoly P = homogeneous_sample(g.p, d, k, n, g.seed);
    return json{{"poly", to_string(P)}, {"degree", P.degree()}, {"depth", P.depth()},
                {"homogeneous", is_homogeneous(P, g.budget).homogeneous}};
  });

  // ---- forms
  auto* forms = app.add_subcommand("forms", "systems of linear forms")->require_subcommand(1);
  std::string system_s, form_s, terms_s, polys_s;

  auto* f_tensor = forms->add_subcommand("tensor", "rank of the d-th tensor powers");
  f_tensor->add_option("--system", system_s)->required();
  f_tensor->add_option("--d", d)->required()->check(CLI::PositiveNumber);
  set(f_tensor, [&] {
    const auto S = FormSystem::parse(g.p, arg_or_file(system_s, ';'));
    const auto tr = tensor_rank(S, d);
    return json{{"system", S.str()}, {"d", tr.d}, {"rank", tr.rank}, {"independent", tr.independent},
                {"witness", tr.witness}};
  });

  auto* f_cs = forms->add_subcommand("cs-complexity", "Cauchy-Schwarz complexity");
  f_cs->add_option("--system", system_s)->required();
  set(f_cs, [&] {
    const auto S = FormSystem::parse(g.p, arg_or_file(system_s, ';'));
    const auto cs = cs_complexity(S);
    json per = json::array();
    for (const auto& c : cs.per_index) per.push_back({{"s", c.s}, {"classes", c.classes}});
    return json{{"system", S.str()}, {"cs_complexity", cs.s}, {"per_index", per}};
  });

  auto* f_tc = forms->add_subcommand("true-complexity", "least d with independent (d+1)-st tensor powers");
  f_tc->add_option("--system", system_s)->required();
  set(f_tc, [&] {
    const auto S = FormSystem::parse(g.p, arg_or_file(system_s, ';'));
    const unsigned tc = true_complexity(S);
    json j{{"system", S.str()}, {"true_complexity", tc}, {"cs_complexity", cs_complexity(S).s}};
    const auto tr = tensor_rank(S, tc);
    if (!tr.independent) j["dependence_witness"] = {{"d", tc}, {"witness", tr.witness}};
    return j;
  });

  auto* f_exp = forms->add_subcommand("expand", "P(L(X)) as a combination of P(M(X)) with |M| <= d");
  f_exp->add_option("--form", form_s)->required();
  f_exp->add_option("--d", d)->required();
  bool leading = false;
  f_exp->add_flag("--leading", leading, "normalize to leading-1 forms (assumes P(0) = 0)");
  set(f_exp, [&] {
    const auto L = LinearForm::parse(g.p, form_s);
    json terms = json::array();
    if (leading) {
      for (const auto& t : normalize_leading(L, d)) terms.push_back({{"a", t.a}, {"c", t.c}, {"form", t.form.str()}});
    } else {
      for (const auto& t : expand_high_weight(L, d)) terms.push_back({{"a", t.a}, {"form", t.form.str()}});
    }
    return json{{"form", L.str()}, {"d", d}, {"terms", terms}};
  });

  auto* f_rw = forms->add_subcommand("rewrite", "normal form of Σ a·P(L(X))");
  f_rw->add_option("--d", d)->required();
  f_rw->add_option("--k", k);
  f_rw->add_option("--terms", terms_s, "e.g. 1*(2) + 2*(1,1)")->required();
  set(f_rw, [&] {
    const auto in = FormalSum::parse(g.p, d, k, arg_or_file(terms_s, ' '));
    const auto out = canonical_rewrite(in);
    return json{{"input", in.str()}, {"normal_form", out.str()}, {"empty", out.empty()}, {"modulus", in.modulus()}};
  });

  auto* f_count = forms->add_subcommand("count", "E ∏ e(P_i(L_i(X)))");
  f_count->add_option("--system", system_s)->required();
  f_count->add_option("--n", n)->required();
  f_count->add_option("--polys", polys_s, "one polynomial per form, ';'-separated (default: all 1)");
  f_count->add_option("--mc", mc, "Monte Carlo samples");
  set(f_count, [&] {
    const auto S = FormSystem::parse(g.p, arg_or_file(system_s, ';'));
    std::vector<ComplexTable> fs;
    const auto ps = polys_s.empty() ? std::vector<std::string>{} : split(arg_or_file(polys_s, ';'), ';');
    if (!ps.empty() && ps.size() != S.size()) throw std::invalid_argument("need one polynomial per form");
    for (std::size_t i = 0; i < S.size(); ++i)
      fs.push_back(ps.empty() ? ComplexTable::constant(g.p, n, 1.0)
                              : ComplexTable::phase_of(parse_poly(g.p, ps[i], n).table()));
    if (mc > 0) {
      const auto e = count_operator_mc(fs, S, mc, g.seed);
      return json{{"re", e.estimate.real()}, {"im", e.estimate.imag()}, {"abs", std::abs(e.estimate)},
                  {"std_error", e.std_error}, {"method", "monte-carlo"}};
    }
    const auto c = count_operator(fs, S, g.budget);
    return json{{"re", c.real()}, {"im", c.imag()}, {"abs", std::abs(c)}, {"method", "exact"}};
  });

  // ---- consist
  auto* consist = app.add_subcommand("consist", "consistency groups and equidistribution")->require_subcommand(1);
  std::string factor_s, lambda_s;
  double epsilon = 0.5;
  unsigned nmax = 3, per_n = 8;

  auto* c_phi = consist->add_subcommand("phi", "consistency group, sampled and from duality");
  c_phi->add_option("--d", d)->required();
  c_phi->add_option("--k", k);
  c_phi->add_option("--system", system_s)->required();
  c_phi->add_option("--nmax", nmax);
  c_phi->add_option("--polys-per-n", per_n);
  set(c_phi, [&] {
    const auto S = FormSystem::parse(g.p, arg_or_file(system_s, ';'));
    const auto sampled = phi_sampled(d, k, S, {nmax, per_n, g.seed, g.budget});
    const auto dual = phi_from_duality(phi_perp_symbolic(d, k, S, g.budget));
    json j{{"system", S.str()}, {"d", d}, {"k", k}, {"sampled", group_json(sampled.group)},
           {"size_by_n", sampled.size_by_n}, {"stable", sampled.stable}, {"dual", group_json(dual.group)},
           {"agree", sampled.group == dual.group}};
    if (sampled.stable_from) j["stable_from"] = *sampled.stable_from;
    if (sampled.stable && !(sampled.group == dual.group)) throw Violation({{"check", "duality"}, {"report", j}});
    return j;
  });

  auto* c_perp = consist->add_subcommand("phiperp", "annihilator from symbolic rewriting");
  c_perp->add_option("--d", d)->required();
  c_perp->add_option("--k", k);
  c_perp->add_option("--system", system_s)->required();
  set(c_perp, [&] {
    const auto S = FormSystem::parse(g.p, arg_or_file(system_s, ';'));
    const auto A = phi_perp_symbolic(d, k, S, g.budget);
    return json{{"system", S.str()}, {"d", d}, {"k", k}, {"annihilator", group_json(A.group)},
                {"ambient", A.group.ambient_size()}};
  });

  auto* c_north = consist->add_subcommand("northo", "near-orthogonality of a factor along a system");
  c_north->add_option("--factor", factor_s, "file or ';'-separated polynomials")->required();
  c_north->add_option("--n", n);
  c_north->add_option("--system", system_s)->required();
  c_north->add_option("--lambda", lambda_s, "file or e.g. 1,1,-1;0,1,2")->required();
  c_north->add_option("--epsilon", epsilon);
  set(c_north, [&] {
    auto B = load_factor(g, factor_s, n);
    const auto S = FormSystem::parse(g.p, arg_or_file(system_s, ';'));
    const auto lam = LambdaMatrix::parse(arg_or_file(lambda_s, ';'));
    // the bias bound is only asserted for a certified factor
    try {
      B.attach(factor_uniformity(B, epsilon, g.budget));
    } catch (const BudgetExceeded&) {
    }
    const auto v = near_orthogonality_check(B, S, lam, epsilon, g.budget);
    json j{{"factor", factor_json(B)}, {"system", S.str()}, {"lambda", lam.str()},
           {"verdict", v.predicted_zero ? "ZERO" : "NONZERO"}, {"identically_zero", v.identically_zero},
           {"bias", v.bias}, {"epsilon", v.epsilon}, {"certified", v.certified}, {"consistent", v.consistent},
           {"row_normal_forms", v.row_normal_forms}};
    if (!v.consistent) throw Violation({{"check", "near-orthogonality"}, {"report", j}});
    return j;
  });

  auto* c_eq = consist->add_subcommand("equidist", "joint distribution of (P_i(L_j(X)))");
  c_eq->add_option("--factor", factor_s)->required();
  c_eq->add_option("--n", n);
  c_eq->add_option("--system", system_s)->required();
  c_eq->add_option("--epsilon", epsilon);
  set(c_eq, [&] {
    const auto B = load_factor(g, factor_s, n);
    const auto S = FormSystem::parse(g.p, arg_or_file(system_s, ';'));
    const auto r = equidist_experiment(B, S, epsilon, g.budget);
    json hist = json::array();
    for (const auto& [cell, cnt] : r.histogram) hist.push_back({{"cell", cell}, {"count", cnt}});
    json j{{"factor", factor_json(B)}, {"system", S.str()}, {"K", r.K}, {"tuples", r.tuples},
           {"observed_cells", r.observed_cells}, {"inconsistent_mass", r.inconsistent_mass},
           {"max_deviation", r.max_deviation}, {"epsilon", r.epsilon}, {"passed", r.passed},
           {"phi_sizes", r.phi_sizes}, {"histogram", hist}};
    if (!r.passed) throw Violation({{"check", "equidistribution"}, {"report", j}});
    return j;
  });

  // ---- factor
  auto* factor = app.add_subcommand("factor", "polynomial factors")->require_subcommand(1);
  std::string sig_s;
  u64 attempts = 200;

  auto* fa_atoms = factor->add_subcommand("atoms", "atom census");
  fa_atoms->add_option("--factor", factor_s)->required();
  fa_atoms->add_option("--n", n);
  set(fa_atoms, [&] {
    const auto B = load_factor(g, factor_s, n);
    const auto c = atom_census(B, g.budget);
    json atoms = json::array();
    for (const auto& [key, size] : c.sizes) {
      json vals = json::array();
      for (const auto& v : key) vals.push_back(v.str());
      atoms.push_back({{"atom", vals}, {"size", size}});
    }
    json j{{"factor", factor_json(B)}, {"count", c.count()}, {"bound", c.bound}, {"within_bound", c.within_bound()},
           {"atoms", atoms}};
    if (!c.within_bound()) throw Violation({{"check", "atom bound"}, {"report", j}});
    return j;
  });

  auto* fa_cond = factor->add_subcommand("condexp", "E[e(Q) | B]");
  fa_cond->add_option("--factor", factor_s)->required();
  fa_cond->add_option("--n", n);
  fa_cond->add_option("--poly", poly_s, "f = e(Q)")->required();
  set(fa_cond, [&] {
    const auto B = load_factor(g, factor_s, n);
    const auto f = ComplexTable::phase_of(parse_poly(g.p, poly_s, B.dim()).table());
    const auto e = conditional_expectation(f, B, g.budget);
    const auto ee = conditional_expectation(e, B, g.budget);
    double drift = 0.0;
    json vals = json::array();
    for (u32 i = 0; i < e.size(); ++i) {
      vals.push_back({e[i].real(), e[i].imag()});
      drift = std::max(drift, std::abs(e[i] - ee[i]));
    }
    json j{{"factor", factor_json(B)}, {"values", vals}, {"idempotence_error", drift}};
    if (drift > 1e-9) throw Violation({{"check", "conditional expectation idempotence"}, {"report", j}});
    return j;
  });

  auto* fa_search = factor->add_subcommand("search", "random search for an ε-uniform homogeneous factor");
  fa_search->add_option("--signatures", sig_s, "d,k pairs, e.g. 2,0;2,1")->required();
  fa_search->add_option("--n", n)->required();
  fa_search->add_option("--epsilon", epsilon);
  fa_search->add_option("--attempts", attempts);
  set(fa_search, [&] {
    const auto r = uniform_factor_search(g.p, parse_signatures(sig_s), n, epsilon, g.seed, attempts, g.budget);
    json j{{"found", r.factor.has_value()}, {"attempts", r.attempts}, {"best_value", r.best_value}};
    if (r.factor) {
      j["factor"] = factor_json(*r.factor);
      j["certificate"] = certificate_json(*r.factor->certificate());
    } else {
      if (r.best) j["best"] = {{"factor", factor_json(*r.best)}, {"certificate", certificate_json(*r.best->certificate())}};
      throw Violation({{"check", "factor search"}, {"report", j}});
    }
    return j;
  });

  // ---- experiment
  auto* experiment = app.add_subcommand("experiment", "property experiments")->require_subcommand(1);
  GowersWolfConfig gw;
  std::string gw_system = "1,0;1,1;1,2;1,3";
  auto* e_gw = experiment->add_subcommand("gowers-wolf", "counting averages against Gowers norms");
  e_gw->add_option("--system", gw_system);
  e_gw->add_option("--n", gw.n);
  e_gw->add_option("--bound-trials", gw.bound_trials);
  e_gw->add_option("--families", gw.families);
  e_gw->add_option("--steps", gw.alpha_steps);
  e_gw->add_option("--bins", gw.bins);
  set(e_gw, [&] {
    gw.p = g.p;
    gw.seed = g.seed;
    gw.budget = g.budget;
    gw.system = FormSystem::parse(g.p, arg_or_file(gw_system, ';'));
    const auto r = run_gowers_wolf_experiment(gw);
    json curve = json::array();
    for (const auto& c : r.curve) curve.push_back({{"alpha", c.alpha}, {"norm", c.norm}, {"count", c.count}});
    json j{{"system", gw.system.str()}, {"n", gw.n}, {"true_complexity", r.true_complexity},
           {"cs_complexity", r.cs_complexity}, {"bound_trials", r.bound_trials},
           {"bound_violations", r.bound_violations}, {"worst_bound_slack", r.worst_bound_slack},
           {"witness", r.witness}, {"curve", curve}, {"bin_max", r.bin_max}, {"monotone", r.monotone},
           {"spearman", r.spearman}};
    if (r.bound_violations > 0 || !r.monotone) throw Violation({{"check", "gowers-wolf"}, {"report", j}});
    return j;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    emit(g, action());
    return 0;
  } catch (const Violation& v) {
    emit(g, json{{"violation", v.record}});
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }
}
