#include "atmd/simulation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "atmd/errors.h"
#include "atmd/number_format.h"

namespace atmd {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits on commas, or on whitespace when the line has no comma.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  if (line.find(',') != std::string::npos) {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
  } else {
    std::stringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(f);
  }
  return fields;
}

bool parse_number(const std::string& text, double& value) {
  if (text.empty()) return false;
  std::size_t used = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size() && std::isfinite(value);
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double Accelerogram::peak() const {
  double p = 0.0;
  for (double a : samples) p = std::max(p, std::abs(a));
  return p;
}

double Accelerogram::at(double t) const {
  if (samples.empty() || t < 0.0) return 0.0;
  const double pos = t / dt;
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const auto last = samples.size() - 1;
  if (i >= last) {
    return pos <= static_cast<double>(last) + 1e-9 ? samples.back() : 0.0;
  }
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * samples[i] + w * samples[i + 1];
}

Accelerogram make_accelerogram(const std::vector<double>& times,
                               const std::vector<double>& values,
                               const AccelerogramOptions& options) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ValidationError("accelerogram needs at least two (t, a) samples");
  }
  if (!(options.scale >= 0.0 && std::isfinite(options.scale))) {
    throw ValidationError("accelerogram scale must be finite and non-negative");
  }
  if (!(options.time_scale > 0.0) || !(options.resample_dt > 0.0)) {
    throw ValidationError(
        "accelerogram time scale and resample interval must be positive");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      throw ValidationError("accelerogram has non-finite entries");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      std::ostringstream msg;
      msg << "accelerogram time column is not strictly increasing at sample "
          << i + 1 << " (t = " << times[i] << ")";
      throw ValidationError(msg.str());
    }
  }

  std::vector<double> knots(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    knots[i] = (times[i] - times.front()) * options.time_scale;
  }

  const double dt = options.resample_dt;
  const double span = knots.back();
  const auto count =
      static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;

  Accelerogram out;
  out.dt = dt;
  out.label = options.label;
  out.samples.resize(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * dt;
    while (seg + 2 < knots.size() && knots[seg + 1] <= t) ++seg;
    const double t0 = knots[seg], t1 = knots[seg + 1];
    const double snap = 1e-9 * dt;
    if (std::abs(t - t0) <= snap) {
      out.samples[k] = values[seg];
    } else if (std::abs(t - t1) <= snap) {
      out.samples[k] = values[seg + 1];
    } else {
      const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
      out.samples[k] = (1.0 - w) * values[seg] + w * values[seg + 1];
    }
  }

  double factor = options.scale;
  if (options.scaling == AmplitudeScaling::kPeak) {
    const double peak = out.peak();
    factor = peak > 0.0 ? options.scale / peak : 0.0;
  }
  for (double& a : out.samples) a *= factor;
  return out;
}

Accelerogram load_accelerogram(const std::string& path,
                               const AccelerogramOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open accelerogram file " + path);

  std::vector<double> times, values;
  double single_dt = 0.0;
  bool single_column = false;
  bool first = true;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (first && text.rfind("dt=", 0) == 0) {
      if (!parse_number(trim(text.substr(3)), single_dt) || !(single_dt > 0.0)) {
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": invalid dt header");
      }
      single_column = true;
      first = false;
      continue;
    }
    const std::vector<std::string> fields = split_fields(text);
    double a = 0.0, b = 0.0;
    if (single_column) {
      if (fields.size() != 1 || !parse_number(fields[0], a)) {
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": expected one acceleration value");
      }
      times.push_back(static_cast<double>(values.size()) * single_dt);
      values.push_back(a);
      continue;
    }
    const bool ok = fields.size() == 2 && parse_number(fields[0], a) &&
                    parse_number(fields[1], b);
    if (!ok) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected two numeric columns (t, accel)");
    }
    first = false;
    times.push_back(a);
    values.push_back(b);
  }

  AccelerogramOptions opts = options;
  if (opts.label.empty()) opts.label = path;
  return make_accelerogram(times, values, opts);
}

SmcController smc_controller(const SlidingDesign& design) {
  return {design.eta, design.M0, design.epsilon};
}

std::string controller_name(const Controller& controller) {
  if (std::holds_alternative<SmcController>(controller)) return "smc";
  if (std::holds_alternative<StateFeedbackController>(controller)) return "lqr";
  return "passive";
}

SimulationTrace simulate(const PlantStateSpace& plant,
                         const Controller& controller,
                         const Accelerogram& quake,
                         const SimulationOptions& options) {
  if (!(quake.dt > 0.0) || quake.samples.size() < 2) {
    throw ValidationError("simulation needs a sampled accelerogram");
  }
  if (!(options.friction >= 0.0)) {
    throw ValidationError("friction level must be non-negative");
  }
  const double dt = quake.dt;
  const double t_end = options.t_end > 0.0 ? options.t_end : quake.duration();
  if (t_end > quake.duration() + 1e-9 * dt) {
    throw ValidationError("simulation end time exceeds the record length");
  }
  const auto steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));

  const Eigen::Matrix4d& A = plant.A;
  const Eigen::Vector4d& B = plant.B;
  const Eigen::Vector4d& D = plant.D;
  const double mu = options.friction;

  auto control = [&](const Eigen::Vector4d& z, double& sigma) {
    sigma = 0.0;
    return std::visit(
        [&](const auto& c) -> double {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, SmcController>) {
            sigma = c.eta * z;
            return control_force(sigma, c.M0, c.epsilon);
          } else if constexpr (std::is_same_v<C, StateFeedbackController>) {
            return -(c.k * z)(0);
          } else {
            return 0.0;
          }
        },
        controller);
  };
  auto rhs = [&](const Eigen::Vector4d& z, double u, double xg) {
    const Eigen::Vector4d dz = A * z + B * (u - mu * sign0(z(2))) + D * xg;
    return dz;
  };

  SimulationTrace tr;
  tr.controller = controller_name(controller);
  for (auto* ch : {&tr.t, &tr.z1, &tr.z2, &tr.z3, &tr.z4, &tr.u, &tr.sigma,
                   &tr.xg_dd}) {
    ch->reserve(steps + 1);
  }
  auto log = [&](double t, const Eigen::Vector4d& z, double u, double sigma,
                 double xg) {
    tr.t.push_back(t);
    tr.z1.push_back(z(0));
    tr.z2.push_back(z(1));
    tr.z3.push_back(z(2));
    tr.z4.push_back(z(3));
    tr.u.push_back(u);
    tr.sigma.push_back(sigma);
    tr.xg_dd.push_back(xg);
  };

  Eigen::Vector4d z = options.initial_state;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    double sigma = 0.0;
    const double u = control(z, sigma);
    const double a0 = quake.samples[k];
    const double a1 = quake.samples[k + 1];
    const double am = 0.5 * (a0 + a1);
    log(t, z, u, sigma, a0);

    const Eigen::Vector4d k1 = rhs(z, u, a0);
    const Eigen::Vector4d k2 = rhs(z + 0.5 * dt * k1, u, am);
    const Eigen::Vector4d k3 = rhs(z + 0.5 * dt * k2, u, am);
    const Eigen::Vector4d k4 = rhs(z + dt * k3, u, a1);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!z.allFinite()) {
      std::ostringstream msg;
      msg << "simulation diverged at t = " << t + dt << " s ("
          << tr.controller << " controller)";
      throw NumericalError(msg.str());
    }
  }
  double sigma = 0.0;
  const double u = control(z, sigma);
  log(static_cast<double>(steps) * dt, z, u, sigma, quake.samples[steps]);
  return tr;
}

TraceSummary summarize(const SimulationTrace& trace, double t_begin,
                       double t_end) {
  if (!(t_end >= t_begin)) {
    throw ValidationError("summary window must satisfy t_begin <= t_end");
  }
  TraceSummary s;
  s.t_begin = t_begin;
  s.t_end = t_end;
  const double slack = 1e-9;
  std::size_t first = trace.size(), last = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.t[i] >= t_begin - slack && trace.t[i] <= t_end + slack) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == trace.size()) {
    throw ValidationError("summary window contains no samples");
  }
  s.samples = last - first + 1;
  auto channel = [&](const std::vector<double>& v) {
    ChannelSummary c;
    double sum = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
      sum += v[i] * v[i];
      c.peak = std::max(c.peak, std::abs(v[i]));
    }
    c.rms = std::sqrt(sum / static_cast<double>(s.samples));
    return c;
  };
  s.z1 = channel(trace.z1);
  s.z2 = channel(trace.z2);
  s.z3 = channel(trace.z3);
  s.z4 = channel(trace.z4);
  s.u = channel(trace.u);
  s.sigma = channel(trace.sigma);
  return s;
}

TraceSummary summarize(const SimulationTrace& trace) {
  if (trace.size() == 0) throw ValidationError("empty trace");
  return summarize(trace, trace.t.front(), trace.t.back());
}

ReachingReport reaching_check(const SimulationTrace& trace, double epsilon) {
  ReachingReport r;
  if (trace.size() == 0) return r;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double s = trace.sigma[i];
    if (std::abs(s) <= epsilon) {
      ++inside;
      continue;
    }
    ++r.samples_outside;
    if (i + 1 < trace.size() && s * (trace.sigma[i + 1] - s) >= 0.0) {
      ++r.reaching_violations;
    }
  }
  r.fraction_in_layer =
      static_cast<double>(inside) / static_cast<double>(trace.size());
  return r;
}

std::string trace_csv(const SimulationTrace& trace) {
  std::ostringstream out;
  out << "t,z1,z2,z3,z4,u,sigma,xg_dd\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_double(trace.t[i]) << ',' << format_double(trace.z1[i])
        << ',' << format_double(trace.z2[i]) << ','
        << format_double(trace.z3[i]) << ',' << format_double(trace.z4[i])
        << ',' << format_double(trace.u[i]) << ','
        << format_double(trace.sigma[i]) << ','
        << format_double(trace.xg_dd[i]) << '\n';
  }
  return out.str();
}

void write_trace_csv(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << trace_csv(trace);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace atmd
