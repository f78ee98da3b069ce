#include "atmd/report.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "atmd/errors.h"

namespace atmd {
namespace {

using nlohmann::json;

template <typename Derived>
json matrix_json(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Derived>
json vector_json(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <typename M>
M read_matrix(const json& j, const char* name) {
  M m;
  const json& rows = j.at(name);
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != m.rows()) {
    throw ValidationError(std::string("bad matrix '") + name + "'");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) {
      throw ValidationError(std::string("bad matrix '") + name + "'");
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

template <typename V>
V read_vector(const json& j, const char* name) {
  const auto values = j.at(name).get<std::vector<double>>();
  V v;
  if constexpr (V::SizeAtCompileTime == Eigen::Dynamic) {
    v.resize(static_cast<Eigen::Index>(values.size()));
  } else if (static_cast<Eigen::Index>(values.size()) != v.size()) {
    throw ValidationError(std::string("bad vector '") + name + "'");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = values[static_cast<std::size_t>(i)];
  }
  return v;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex read_complex(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json tuple_json(const TuningTuple& t) {
  return {{"zeta", t.zeta},
          {"omega_n", t.omega_n},
          {"omega_ratio", t.omega_ratio},
          {"eta", vector_json(t.eta)},
          {"kappa1", t.kappa1},
          {"kappa2", t.kappa2},
          {"kappa3", t.kappa3},
          {"kappa_u", t.kappa_u},
          {"lambda1", complex_json(t.lambda1)},
          {"lambda2", complex_json(t.lambda2)},
          {"lambda3", t.lambda3},
          {"psi1", t.psi1},
          {"psi2", t.psi2}};
}

TuningTuple tuple_from_json(const json& j) {
  TuningTuple t;
  t.zeta = j.at("zeta").get<double>();
  t.omega_n = j.at("omega_n").get<double>();
  t.omega_ratio = j.at("omega_ratio").get<double>();
  t.eta = read_vector<Eigen::RowVector4d>(j, "eta");
  t.kappa1 = j.at("kappa1").get<double>();
  t.kappa2 = j.at("kappa2").get<double>();
  t.kappa3 = j.at("kappa3").get<double>();
  t.kappa_u = j.at("kappa_u").get<double>();
  t.lambda1 = read_complex(j.at("lambda1"));
  t.lambda2 = read_complex(j.at("lambda2"));
  t.lambda3 = j.at("lambda3").get<double>();
  t.psi1 = j.at("psi1").get<double>();
  t.psi2 = j.at("psi2").get<double>();
  return t;
}

json channel_json(const ChannelSummary& c) {
  return {{"rms", c.rms}, {"peak", c.peak}};
}

ChannelSummary channel_from_json(const json& j) {
  return {j.at("rms").get<double>(), j.at("peak").get<double>()};
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// Wraps json access errors so callers see one exception type.
template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

json to_json(const ModalModel& modal) {
  return {{"phi0", vector_json(modal.phi0)}, {"m0", modal.m0},
          {"c0", modal.c0},                  {"k0", modal.k0},
          {"beta0", modal.beta0},            {"omega0", modal.omega0}};
}

ModalModel modal_from_json(const json& j) {
  return guarded("modal model", [&] {
    ModalModel m;
    m.phi0 = read_vector<Eigen::VectorXd>(j, "phi0");
    m.m0 = j.at("m0").get<double>();
    m.c0 = j.at("c0").get<double>();
    m.k0 = j.at("k0").get<double>();
    m.beta0 = j.at("beta0").get<double>();
    m.omega0 = j.at("omega0").get<double>();
    return m;
  });
}

json to_json(const PlantStateSpace& plant) {
  return {{"A", matrix_json(plant.A)},
          {"B", vector_json(plant.B)},
          {"D", vector_json(plant.D)},
          {"delta", plant.bounds.delta},
          {"varpi", plant.bounds.varpi},
          {"m0", plant.m0},
          {"m_d", plant.m_d},
          {"beta0", plant.beta0},
          {"omega0", plant.omega0}};
}

PlantStateSpace plant_from_json(const json& j) {
  return guarded("plant", [&] {
    PlantStateSpace p;
    p.A = read_matrix<Eigen::Matrix4d>(j, "A");
    p.B = read_vector<Eigen::Vector4d>(j, "B");
    p.D = read_vector<Eigen::Vector4d>(j, "D");
    p.bounds.delta = j.at("delta").get<double>();
    p.bounds.varpi = j.at("varpi").get<double>();
    p.m0 = j.at("m0").get<double>();
    p.m_d = j.at("m_d").get<double>();
    p.beta0 = j.at("beta0").get<double>();
    p.omega0 = j.at("omega0").get<double>();
    return p;
  });
}

json to_json(const SlidingDesign& d) {
  return {{"zeta", d.poles.zeta},
          {"omega_n", d.poles.omega_n},
          {"lambda3", d.poles.lambda3},
          {"lambda4", d.poles.lambda4},
          {"eta", vector_json(d.eta)},
          {"k_gain", vector_json(d.k_gain)},
          {"A1", matrix_json(d.reduced.A1)},
          {"B1", vector_json(d.reduced.B1)},
          {"T", matrix_json(d.reduced.T)},
          {"alpha1", d.reduced.alpha1},
          {"alpha2", d.reduced.alpha2},
          {"nu1", vector_json(d.reduced.nu1)},
          {"M0", d.M0},
          {"epsilon", d.epsilon}};
}

SlidingDesign design_from_json(const json& j) {
  return guarded("sliding design", [&] {
    SlidingDesign d;
    d.poles.zeta = j.at("zeta").get<double>();
    d.poles.omega_n = j.at("omega_n").get<double>();
    d.poles.lambda3 = j.at("lambda3").get<double>();
    d.poles.lambda4 = j.at("lambda4").get<double>();
    d.eta = read_vector<Eigen::RowVector4d>(j, "eta");
    d.k_gain = read_vector<Eigen::RowVector4d>(j, "k_gain");
    d.reduced.A1 = read_matrix<Eigen::Matrix3d>(j, "A1");
    d.reduced.B1 = read_vector<Eigen::Vector3d>(j, "B1");
    d.reduced.T = read_matrix<Eigen::Matrix4d>(j, "T");
    d.reduced.alpha1 = j.at("alpha1").get<double>();
    d.reduced.alpha2 = j.at("alpha2").get<double>();
    d.reduced.nu1 = read_vector<Eigen::RowVector3d>(j, "nu1");
    d.M0 = j.at("M0").get<double>();
    d.epsilon = j.at("epsilon").get<double>();
    return d;
  });
}

json to_json(const TuningResult& r) {
  json j = {{"feasible", r.feasible},
            {"message", r.message},
            {"index", to_string(r.index)},
            {"omega0", r.omega0},
            {"grid_points", r.grid_points},
            {"feasible_count", r.feasible_count()}};
  if (r.best) {
    j["best_index"] = r.best_index;
    j["best"] = tuple_json(*r.best);
    j["chi"] = r.chi;
    j["M0"] = r.M0;
    const FeasibleRegion region = feasible_region(r);
    j["feasible_region"] = {
        {"zeta", {region.zeta.lower, region.zeta.upper}},
        {"omega_ratio", {region.omega_ratio.lower, region.omega_ratio.upper}}};
  }
  if (r.design) j["design"] = to_json(*r.design);
  json tuples = json::array();
  for (const TuningTuple& t : r.tuples) tuples.push_back(tuple_json(t));
  j["tuples"] = std::move(tuples);
  return j;
}

TuningResult tuning_result_from_json(const json& j) {
  return guarded("tuning result", [&] {
    TuningResult r;
    r.feasible = j.at("feasible").get<bool>();
    r.message = j.at("message").get<std::string>();
    r.index = parse_performance_index(j.at("index").get<std::string>());
    r.omega0 = j.at("omega0").get<double>();
    r.grid_points = j.at("grid_points").get<std::size_t>();
    for (const json& t : j.at("tuples")) r.tuples.push_back(tuple_from_json(t));
    if (j.contains("best")) {
      r.best_index = j.at("best_index").get<std::size_t>();
      r.best = tuple_from_json(j.at("best"));
      r.chi = j.at("chi").get<double>();
      r.M0 = j.at("M0").get<double>();
    }
    if (j.contains("design")) r.design = design_from_json(j.at("design"));
    return r;
  });
}

json to_json(const LqrResult& r) {
  json eigs = json::array();
  for (const auto& e : r.closed_loop_eigs) eigs.push_back(complex_json(e));
  return {{"k", vector_json(r.k)},
          {"P", matrix_json(r.P)},
          {"closed_loop_eigs", std::move(eigs)},
          {"residual", r.residual},
          {"iterations", r.iterations}};
}

LqrResult lqr_result_from_json(const json& j) {
  return guarded("LQR result", [&] {
    LqrResult r;
    r.k = read_vector<Eigen::RowVector4d>(j, "k");
    r.P = read_matrix<Eigen::Matrix4d>(j, "P");
    const json& eigs = j.at("closed_loop_eigs");
    if (eigs.size() != 4) throw ValidationError("expected four eigenvalues");
    for (std::size_t i = 0; i < 4; ++i) r.closed_loop_eigs[i] = read_complex(eigs[i]);
    r.residual = j.at("residual").get<double>();
    r.iterations = j.at("iterations").get<int>();
    return r;
  });
}

json to_json(const TraceSummary& s) {
  return {{"t_begin", s.t_begin},       {"t_end", s.t_end},
          {"samples", s.samples},       {"z1", channel_json(s.z1)},
          {"z2", channel_json(s.z2)},   {"z3", channel_json(s.z3)},
          {"z4", channel_json(s.z4)},   {"u", channel_json(s.u)},
          {"sigma", channel_json(s.sigma)}};
}

TraceSummary summary_from_json(const json& j) {
  return guarded("trace summary", [&] {
    TraceSummary s;
    s.t_begin = j.at("t_begin").get<double>();
    s.t_end = j.at("t_end").get<double>();
    s.samples = j.at("samples").get<std::size_t>();
    s.z1 = channel_from_json(j.at("z1"));
    s.z2 = channel_from_json(j.at("z2"));
    s.z3 = channel_from_json(j.at("z3"));
    s.z4 = channel_from_json(j.at("z4"));
    s.u = channel_from_json(j.at("u"));
    s.sigma = channel_from_json(j.at("sigma"));
    return s;
  });
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string modal_report(const ModalModel& modal, const PlantStateSpace& plant) {
  std::ostringstream os;
  os << "Dominant mode\n"
     << "  m0     = " << fixed(modal.m0, 4) << " kg\n"
     << "  k0     = " << fixed(modal.k0, 3) << " N/m\n"
     << "  c0     = " << fixed(modal.c0, 4) << " N s/m\n"
     << "  beta0  = " << fixed(modal.beta0, 4) << "\n"
     << "  omega0 = " << fixed(modal.omega0, 4) << " rad/s\n";
  if (plant.beta0 != modal.beta0) {
    os << "  plant beta0 = " << fixed(plant.beta0, 4) << " (override)\n";
  }
  os << "Plant A\n";
  for (int i = 0; i < 4; ++i) {
    os << " ";
    for (int c = 0; c < 4; ++c) os << ' ' << fixed(plant.A(i, c), 4);
    os << '\n';
  }
  os << "B = [";
  for (int i = 0; i < 4; ++i) os << (i ? ", " : "") << fixed(plant.B(i), 6);
  os << "]\nD = [";
  for (int i = 0; i < 4; ++i) os << (i ? ", " : "") << fixed(plant.D(i), 6);
  os << "]\n";
  return os.str();
}

std::string tuning_table(const std::vector<NamedTuning>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line,
                "%-8s %6s %8s  %-36s %8s %8s %9s %8s %8s\n", "index", "zeta",
                "wn/w0", "eta", "k1[cm]", "k2[mm]", "k3[cm/s]", "ku[N]",
                "M0[N]");
  os << line;
  for (const NamedTuning& row : rows) {
    const TuningResult& r = row.result;
    if (!r.best) {
      os << row.name << "  " << r.message << '\n';
      continue;
    }
    const TuningTuple& t = *r.best;
    std::string eta = "[";
    for (int i = 0; i < 4; ++i) {
      eta += (i ? ", " : "") + fixed(t.eta(i), 3);
    }
    eta += "]";
    std::snprintf(line, sizeof line,
                  "%-8s %6.2f %8.2f  %-36s %8.3f %8.3f %9.3f %8.3f %8.3f\n",
                  row.name.c_str(), t.zeta, t.omega_ratio, eta.c_str(),
                  100.0 * t.kappa1, 1000.0 * t.kappa2, 100.0 * t.kappa3,
                  t.kappa_u, r.M0);
    os << line;
  }
  return os.str();
}

std::string comparison_table(const std::vector<NamedSummary>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %19s %19s %19s %19s\n", "",
                "z1 [cm]", "z2 [mm]", "z3 [cm/s]", "u [N]");
  os << line;
  std::snprintf(line, sizeof line,
                "%-10s %9s %9s %9s %9s %9s %9s %9s %9s\n", "controller", "rms",
                "peak", "rms", "peak", "rms", "peak", "rms", "peak");
  os << line;
  for (const NamedSummary& row : rows) {
    const TraceSummary& s = row.summary;
    std::snprintf(line, sizeof line,
                  "%-10s %9.3f %9.3f %9.3f %9.3f %9.3f %9.3f %9.3f %9.3f\n",
                  row.name.c_str(), 100.0 * s.z1.rms, 100.0 * s.z1.peak,
                  1000.0 * s.z2.rms, 1000.0 * s.z2.peak, 100.0 * s.z3.rms,
                  100.0 * s.z3.peak, s.u.rms, s.u.peak);
    os << line;
  }
  return os.str();
}

std::string lqr_report(const LqrResult& r, const EquivalentPoles& poles) {
  std::ostringstream os;
  os << "k = [";
  for (int i = 0; i < 4; ++i) os << (i ? ", " : "") << fixed(r.k(i), 4);
  os << "]\nclosed-loop poles:";
  for (const auto& e : r.closed_loop_eigs) {
    os << ' ' << fixed(e.real(), 4);
    if (e.imag() != 0.0) {
      os << (e.imag() < 0 ? "-" : "+") << fixed(std::abs(e.imag()), 4) << 'j';
    }
  }
  os << "\nequivalent zeta = " << fixed(poles.zeta, 4)
     << ", omega_n/omega0 = " << fixed(poles.omega_ratio, 4) << '\n'
     << "Riccati residual = " << r.residual << " after " << r.iterations
     << " iterations\n";
  return os.str();
}

}  // namespace atmd
