#pragma once

// The `pbl` command line. run_cli takes the full argument list (program
// name first) and returns the process exit code: 0 success, 2 invalid
// input, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbl/billiard.hpp"
#include "pbl/confocal.hpp"
#include "pbl/metric.hpp"
#include "pbl/periodicity.hpp"
#include "pbl/relativistic.hpp"

namespace pbl {

namespace cli {

using nlohmann::json;

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

/// Decimal or p/q as an exact rational.
inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const Rational p = parse_rational(s.substr(0, slash));
    const Rational q = parse_rational(s.substr(slash + 1));
    if (q == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator in '" + s + "'");
    return p / q;
  }
  std::string digits;
  bool neg = false;
  int scale = 0, exp10 = 0;
  bool seen_point = false, any = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  for (; i < s.size(); ++i) {
    const char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits += ch;
      any = true;
      if (seen_point) ++scale;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if ((ch == 'e' || ch == 'E') && any) {
      exp10 = std::stoi(s.substr(i + 1));
      i = s.size();
      break;
    } else {
      throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
    }
  }
  if (!any) throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  Rational r{boost::multiprecision::cpp_int(digits)};
  const int e = exp10 - scale;
  boost::multiprecision::cpp_int p10 = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), std::abs(e));
  r = e >= 0 ? Rational(r * p10) : Rational(r / p10);
  return neg ? Rational(-r) : r;
}

inline bool is_inf_token(const std::string& s) {
  return s == "inf" || s == "+inf" || s == "Inf" || s == "infinity";
}

/// Decimal, p/q or inf.
inline double parse_number(const std::string& s) {
  if (is_inf_token(s)) return kInfinity;
  if (s.find('/') != std::string::npos) return static_cast<double>(parse_rational(s));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  }
  if (used != s.size()) throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s)) out.push_back(parse_number(item));
  return out;
}

inline Vector parse_vector(const std::string& s) {
  const auto v = parse_list(s);
  Vector x(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<int>(i)) = v[i];
  return x;
}

inline Signature parse_signature(const std::string& s) {
  const auto p = split(s);
  if (p.size() != 2) throw Error(ErrorCode::InvalidArgument, "signature must be k,l");
  return Signature(std::stoi(p[0]), std::stoi(p[1]));
}

inline json number_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

inline json vector_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json caustics_json(const std::vector<double>& c) {
  json a = json::array();
  for (double x : c) a.push_back(number_json(x));
  return a;
}

inline double json_number(const json& j) {
  if (j.is_string()) return parse_number(j.get<std::string>());
  return j.get<double>();
}

inline Vector json_vector(const json& j) {
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = json_number(j[i]);
  return v;
}

inline json trajectory_json(const Trajectory& tr) {
  const Signature& sig = tr.family.signature();
  json j;
  j["signature"] = {sig.k(), sig.l()};
  j["axes"] = tr.family.axes();
  j["caustics"] = caustics_json(tr.caustics.params);
  j["lineType"] = to_string(tr.lineType);
  j["start"] = vector_json(tr.start);
  j["dir"] = vector_json(tr.startDir);
  json b = json::array();
  for (const Bounce& bn : tr.bounces)
    b.push_back({{"p", vector_json(bn.p)},
                 {"vin", vector_json(bn.vin)},
                 {"vout", vector_json(bn.vout)},
                 {"double", bn.doubleReflection}});
  j["bounces"] = b;
  j["drift"] = tr.max_drift();
  return j;
}

inline json report_json(const PonceletReport& r) {
  return {{"condition", r.condition},
          {"n", r.n},
          {"caustics", caustics_json(r.caustics)},
          {"samples", r.samples},
          {"closed", r.closed},
          {"worstPositionError", r.worstPositionError}};
}

/// Writes to the file named by `path`, or to `out` when it is empty or "-".
inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Options {
  std::string sig = "2,1";
  std::string axes;
  std::string start, dir, point, caustics;
  std::string out, in;
  std::string grid = "100x100";
  std::string lambdaRange;
  double lambda = 0.0;
  bool haveLambda = false;
  int bounces = 100;
  int n = 4;
  int maxN = 64;
  int samples = 20;
  int points = 4000;
  unsigned seed = 2024;
  double relTol = 1e-9;
  double tol = 1e-6;
  bool exact = false;
};

inline ConfocalFamily family_of(const Options& o) {
  if (o.axes.empty()) throw Error(ErrorCode::InvalidArgument, "--axes is required");
  return ConfocalFamily(parse_signature(o.sig), parse_list(o.axes));
}

inline CausticSet caustics_of(const Options& o, const ConfocalFamily& fam) {
  if (o.caustics.empty()) throw Error(ErrorCode::InvalidArgument, "--caustics is required");
  return make_caustic_set(parse_list(o.caustics), fam);
}

inline Trajectory trajectory_from_json(const json& j) {
  const Signature sig(j.at("signature")[0].get<int>(), j.at("signature")[1].get<int>());
  std::vector<double> axes;
  for (const auto& a : j.at("axes")) axes.push_back(json_number(a));
  ConfocalFamily fam(sig, axes);
  Trajectory tr{fam, json_vector(j.at("start")), json_vector(j.at("dir")), {}, {}, LineType::SpaceLike, {}, {}, {}};
  int refl = 0;
  for (const auto& b : j.at("bounces")) {
    const bool twice = b.at("double").get<bool>();
    refl += twice ? 2 : 1;
    tr.bounces.push_back({json_vector(b.at("p")), json_vector(b.at("vin")), json_vector(b.at("vout")), twice});
    tr.reflectionIndex.push_back(refl);
  }
  return tr;
}

inline int cmd_trace(const Options& o, std::ostream& out) {
  const ConfocalFamily fam = family_of(o);
  const Trajectory tr = trace(fam, parse_vector(o.start), parse_vector(o.dir), o.bounces);
  emit(trajectory_json(tr).dump(2) + "\n", o.out, out);
  return 0;
}

inline int cmd_caustics(const Options& o, std::ostream& out) {
  const ConfocalFamily fam = family_of(o);
  const Line line{parse_vector(o.start), parse_vector(o.dir)};
  const CausticSet c = caustics(fam, line);
  const InterlacingReport r = interlacing_check(fam, c, line_type(line.dir, fam.signature()));
  json clauses = json::array();
  for (const auto& cl : r.clauses) clauses.push_back({{"clause", cl.name}, {"ok", cl.ok}});
  json j{{"caustics", caustics_json(c.params)},
         {"lineType", to_string(line_type(line.dir, fam.signature()))},
         {"typeFromCaustics", to_string(trajectory_type_from_caustics(fam, c))},
         {"interlacing", r.passed()},
         {"clauses", clauses}};
  emit(j.dump(2) + "\n", o.out, out);
  return 0;
}

inline int cmd_classify(const Options& o, std::ostream& out) {
  const ConfocalFamily fam = family_of(o);
  const Vector x = parse_vector(o.point);
  const GeneralizedJacobi J = jacobi_coordinates(fam, x);
  json j{{"jacobi", J.real}};
  j["complexPair"] = J.complex_pair ? json{J.complex_pair->real(), J.complex_pair->imag()} : json(nullptr);
  if (o.haveLambda) j["type"] = to_string(relativistic_type(fam, x, o.lambda));
  if (fam.dim() == 3 && fam.signature() == Signature(2, 1) && o.haveLambda)
    j["geometricType"] = to_string(geometric_type_3d(fam, o.lambda));
  emit(j.dump(2) + "\n", o.out, out);
  return 0;
}

inline int cmd_decorate(const Options& o, std::ostream& out) {
  const ConfocalFamily fam = family_of(o);
  json a = json::array();
  for (const auto& [type, lambda] : decorated_coordinates(fam, parse_vector(o.point)))
    a.push_back({{"type", to_string(type)}, {"lambda", lambda}});
  emit(a.dump(2) + "\n", o.out, out);
  return 0;
}

inline int cmd_cayley(const Options& o, std::ostream& out) {
  bool ok;
  if (o.exact) {
    const Signature sig = parse_signature(o.sig);
    std::vector<Rational> axes;
    for (const auto& s : split(o.axes)) axes.push_back(parse_rational(s));
    std::vector<std::optional<Rational>> cs;
    for (const auto& s : split(o.caustics))
      cs.push_back(is_inf_token(s) ? std::nullopt : std::optional<Rational>(parse_rational(s)));
    // the family check validates the ordering of the axes
    const ConfocalFamily fam(sig, parse_list(o.axes));
    if (!admissible_caustics(fam, caustics_of(o, fam)))
      throw Error(ErrorCode::InadmissibleCaustics, "caustic parameters violate the interlacing");
    ok = cayley_condition_exact(sig, axes, cs, o.n);
  } else {
    const ConfocalFamily fam = family_of(o);
    ok = cayley_condition(fam, caustics_of(o, fam), o.n, o.relTol);
  }
  emit(std::string(ok ? "true" : "false") + "\n", o.out, out);
  return 0;
}

inline int cmd_search(const Options& o, std::ostream& out) {
  const ConfocalFamily fam = family_of(o);
  SearchGrid g;
  g.pointsPerInterval = o.points;
  json a = find_periodic_caustics_plane(fam, o.n, g);
  emit(a.dump(2) + "\n", o.out, out);
  return 0;
}

inline int cmd_lightlike(const Options& o, std::ostream& out) {
  const auto ab = parse_list(o.axes);
  if (ab.size() != 2) throw Error(ErrorCode::InvalidArgument, "--axes must be a,b");
  const auto p = lightlike_period(ab[0], ab[1], o.maxN);
  json j{{"rectangleRatio", rectangle_ratio(ab[0], ab[1])}};
  j["period"] = p ? json{{"n", p->n}, {"k", p->k}} : json(nullptr);
  if (p) j["axisRatios"] = count_axis_ratios(p->n);
  emit(j.dump(2) + "\n", o.out, out);
  return 0;
}

inline int cmd_tropic(const Options& o, std::ostream& out) {
  const ConfocalFamily fam(Signature(2, 1), parse_list(o.axes));
  const auto g = split(o.grid, 'x');
  if (g.size() != 2) throw Error(ErrorCode::InvalidArgument, "--grid must be NxM");
  const int nl = std::stoi(g[0]), nt = std::stoi(g[1]);
  if (nl < 2 || nt < 1) throw Error(ErrorCode::InvalidArgument, "grid too small");
  const double a = fam.a(0), c = fam.a(2);
  double lo = -c - (a + c), hi = a + (a + c);
  if (!o.lambdaRange.empty()) {
    const auto r = parse_list(o.lambdaRange);
    if (r.size() != 2 || !(r[0] < r[1])) throw Error(ErrorCode::InvalidArgument, "--lambda-range must be lo,hi");
    lo = r[0];
    hi = r[1];
  }
  std::string csv = "sheet,lambda,t,x,y,z\n";
  for (Sheet sh : {Sheet::Plus, Sheet::Minus})
    for (int i = 0; i < nl; ++i) {
      const double lambda = lo + (hi - lo) * i / (nl - 1);
      if (fam.is_degenerate(lambda, 1e-9)) continue;
      for (int k = 0; k < nt; ++k) {
        const double t = 2.0 * std::numbers::pi * k / nt;
        const Vector p = tropic_point(fam, lambda, t, sh);
        csv += (sh == Sheet::Plus ? "+," : "-,") + format_g17(lambda) + "," + format_g17(t) + "," +
               format_g17(p(0)) + "," + format_g17(p(1)) + "," + format_g17(p(2)) + "\n";
      }
    }
  emit(csv, o.out, out);
  return 0;
}

inline int cmd_poncelet(const Options& o, std::ostream& out) {
  const ConfocalFamily fam = family_of(o);
  PonceletOptions po;
  po.seed = o.seed;
  po.tol = o.tol;
  po.relTol = o.relTol;
  const PonceletReport r = poncelet_verify(fam, caustics_of(o, fam), o.n, o.samples, po);
  emit(report_json(r).dump(2) + "\n", o.out, out);
  return r.closed == r.samples ? 0 : 3;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  if (o.in.empty()) throw Error(ErrorCode::InvalidArgument, "--in is required");
  std::ifstream f(o.in);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read '" + o.in + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad trajectory file: ") + e.what());
  }
  Trajectory recorded = [&] {
    try {
      return trajectory_from_json(j);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("bad trajectory file: ") + e.what());
    }
  }();
  const Trajectory fresh = trace(recorded.family, recorded.start, recorded.startDir,
                                 static_cast<int>(recorded.bounces.size()));
  double worst = 0.0;
  for (std::size_t i = 0; i < fresh.bounces.size(); ++i)
    worst = std::max(worst, (fresh.bounces[i].p - recorded.bounces[i].p).norm());
  const double recordedDrift = json_number(j.at("drift"));
  const bool driftOk = std::abs(fresh.max_drift() - recordedDrift) <= 1e-12 + 1e-6 * recordedDrift;

  json closure = nullptr, closureRecorded = nullptr;
  bool closureOk = true;
  if (fresh.bounces.size() >= 2) {
    const ClosureReport a = closure_test(fresh, o.tol), b = closure_test(recorded, o.tol);
    closure = {{"closed", a.closed}, {"period", a.period ? json(*a.period) : json(nullptr)}};
    closureRecorded = {{"closed", b.closed}, {"period", b.period ? json(*b.period) : json(nullptr)}};
    closureOk = a.closed == b.closed && a.period == b.period;
  }
  const bool ok = worst <= 1e-9 && driftOk && closureOk;
  json r{{"reproduced", ok},
         {"drift", fresh.max_drift()},
         {"recordedDrift", recordedDrift},
         {"maxPointDeviation", worst},
         {"closure", closure},
         {"recordedClosure", closureRecorded}};
  emit(r.dump(2) + "\n", o.out, out);
  return ok ? 0 : 3;
}

}  // namespace cli

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  using namespace cli;
  CLI::App app{"pseudo-Euclidean billiards toolkit", "pbl"};
  app.require_subcommand(1);
  Options o;

  auto family_flags = [&](CLI::App* s, bool needSig = true) {
    if (needSig) s->add_option("--sig", o.sig, "signature k,l");
    s->add_option("--axes", o.axes, "positive a_1..a_d, comma separated")->required();
  };
  auto out_flag = [&](CLI::App* s) { s->add_option("--out", o.out, "output file (default stdout)"); };

  auto* trace_cmd = app.add_subcommand("trace", "trace a billiard trajectory to JSON");
  family_flags(trace_cmd);
  trace_cmd->add_option("--start", o.start)->required();
  trace_cmd->add_option("--dir", o.dir)->required();
  trace_cmd->add_option("--bounces", o.bounces);
  out_flag(trace_cmd);

  auto* caus = app.add_subcommand("caustics", "caustic parameters and interlacing of a line");
  family_flags(caus);
  caus->add_option("--start", o.start)->required();
  caus->add_option("--dir", o.dir)->required();
  out_flag(caus);

  auto* cls = app.add_subcommand("classify-point", "Jacobi coordinates and relativistic type");
  family_flags(cls);
  cls->add_option("--point", o.point)->required();
  auto* lam = cls->add_option("--lambda", o.lambda, "quadric parameter to type");
  out_flag(cls);

  auto* dec = app.add_subcommand("decorate", "decorated Jacobi coordinates of a point");
  family_flags(dec);
  dec->add_option("--point", o.point)->required();
  out_flag(dec);

  auto* cay = app.add_subcommand("cayley", "Cayley periodicity condition");
  family_flags(cay);
  cay->add_option("--caustics", o.caustics)->required();
  cay->add_option("--n", o.n)->required();
  cay->add_flag("--exact", o.exact, "rational arithmetic (inputs as p/q or decimals)");
  cay->add_option("--rel-tol", o.relTol);
  out_flag(cay);

  auto* search = app.add_subcommand("search-periodic", "periodic caustics of a planar family");
  family_flags(search);
  search->add_option("--n", o.n)->required();
  search->add_option("--points", o.points, "grid points per interval");
  out_flag(search);

  auto* light = app.add_subcommand("lightlike", "period of light-like trajectories in x^2/a + y^2/b = 1");
  light->add_option("--axes", o.axes, "a,b")->required();
  light->add_option("--max-n", o.maxN);
  out_flag(light);

  auto* trop = app.add_subcommand("tropic", "sample the tropic surfaces to CSV");
  trop->add_option("--axes", o.axes, "a,b,c")->required();
  trop->add_option("--grid", o.grid, "NxM samples in (lambda, t)");
  trop->add_option("--lambda-range", o.lambdaRange, "lo,hi");
  out_flag(trop);

  auto* pon = app.add_subcommand("poncelet", "check closure of trajectories sharing caustics");
  family_flags(pon);
  pon->add_option("--caustics", o.caustics)->required();
  pon->add_option("--n", o.n)->required();
  pon->add_option("--samples", o.samples);
  pon->add_option("--seed", o.seed);
  pon->add_option("--tol", o.tol);
  out_flag(pon);

  auto* ver = app.add_subcommand("verify", "re-trace a trajectory JSON and compare");
  ver->add_option("--in", o.in)->required();
  ver->add_option("--tol", o.tol, "closure tolerance");
  out_flag(ver);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (search->parsed() && search->count("--sig") == 0) o.sig = "1,1";
  o.haveLambda = lam->count() > 0;

  try {
    if (trace_cmd->parsed()) return cmd_trace(o, out);
    if (caus->parsed()) return cmd_caustics(o, out);
    if (cls->parsed()) return cmd_classify(o, out);
    if (dec->parsed()) return cmd_decorate(o, out);
    if (cay->parsed()) return cmd_cayley(o, out);
    if (search->parsed()) return cmd_search(o, out);
    if (light->parsed()) return cmd_lightlike(o, out);
    if (trop->parsed()) return cmd_tropic(o, out);
    if (pon->parsed()) return cmd_poncelet(o, out);
    if (ver->parsed()) return cmd_verify(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numerical(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace pbl
