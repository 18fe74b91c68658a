#include "asv/dynamics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace asv {

bool VesselState::finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(psi) &&
         std::isfinite(u) && std::isfinite(v) && std::isfinite(r);
}

Eigen::Matrix3d rotation_matrix(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Eigen::Matrix3d R;
  R << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  return R;
}

Eigen::Matrix3d VesselModel::coriolis(const Eigen::Vector3d& nu) const {
  // General 3-DOF form: the skew structure guarantees nu' C nu = 0 for any
  // symmetric mass matrix, which keeps the energy bookkeeping exact.
  const double a1 = mass(0, 0) * nu(0) + mass(0, 1) * nu(1) + mass(0, 2) * nu(2);
  const double a2 = mass(1, 0) * nu(0) + mass(1, 1) * nu(1) + mass(1, 2) * nu(2);
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  C(0, 2) = -a2;
  C(1, 2) = a1;
  C(2, 0) = a2;
  C(2, 1) = -a1;
  return C;
}

Eigen::Matrix3d VesselModel::damping(const Eigen::Vector3d& nu) const {
  return damping_linear + std::abs(nu(0)) * damping_quad_u +
         std::abs(nu(1)) * damping_quad_v + std::abs(nu(2)) * damping_quad_r;
}

ControlInput VesselModel::saturate(const ControlInput& f) const {
  return {std::clamp(f.surge_force, -max_surge_force, max_surge_force),
          std::clamp(f.yaw_moment, -max_yaw_moment, max_yaw_moment)};
}

ControlInput VesselModel::scale_action(double a_surge, double a_yaw) const {
  return saturate({a_surge * max_surge_force, a_yaw * max_yaw_moment});
}

void VesselModel::validate() const {
  if (!mass.allFinite()) throw std::invalid_argument("vessel model: mass matrix has non-finite entries");
  if (!mass.isApprox(mass.transpose(), 1e-9))
    throw std::invalid_argument("vessel model: mass matrix must be symmetric");
  Eigen::LLT<Eigen::Matrix3d> llt(mass);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("vessel model: mass matrix must be positive definite");
  if (!(length > 0.0) || !(width > 0.0))
    throw std::invalid_argument("vessel model: length and width must be positive");
  if (!(max_speed > 0.0)) throw std::invalid_argument("vessel model: max_speed must be positive");
  if (!(max_surge_force > 0.0) || !(max_yaw_moment > 0.0))
    throw std::invalid_argument("vessel model: control limits must be positive");
}

Eigen::Matrix<double, 6, 1> state_derivative(const VesselState& state,
                                             const ControlInput& input,
                                             const VesselModel& model) {
  const Eigen::Vector3d nu = state.velocity();
  const Eigen::Vector2d f(input.surge_force, input.yaw_moment);
  Eigen::Matrix<double, 6, 1> d;
  d.head<3>() = rotation_matrix(state.psi) * nu;
  d.tail<3>() = model.mass_inv *
                (model.actuation * f - (model.coriolis(nu) + model.damping(nu)) * nu);
  return d;
}

VesselState step(const VesselState& state, const ControlInput& input,
                 const VesselModel& model, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dynamics step: dt must be positive");
  const ControlInput f = model.saturate(input);

  auto deriv = [&](const Eigen::Matrix<double, 6, 1>& z) {
    VesselState s;
    s.x = z(0); s.y = z(1); s.psi = z(2);
    s.u = z(3); s.v = z(4); s.r = z(5);
    return state_derivative(s, f, model);
  };

  Eigen::Matrix<double, 6, 1> z;
  z << state.x, state.y, state.psi, state.u, state.v, state.r;
  const Eigen::Matrix<double, 6, 1> k1 = deriv(z);
  const Eigen::Matrix<double, 6, 1> k2 = deriv(z + 0.5 * dt * k1);
  const Eigen::Matrix<double, 6, 1> k3 = deriv(z + 0.5 * dt * k2);
  const Eigen::Matrix<double, 6, 1> k4 = deriv(z + dt * k3);
  z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  VesselState out;
  out.x = z(0); out.y = z(1); out.psi = wrap_angle(z(2));
  out.u = z(3); out.v = z(4); out.r = z(5);
  if (!out.finite()) {
    std::ostringstream msg;
    msg << "dynamics step produced a non-finite state from (x=" << state.x
        << ", y=" << state.y << ", psi=" << state.psi << ", u=" << state.u
        << ", v=" << state.v << ", r=" << state.r << ") with input ("
        << f.surge_force << ", " << f.yaw_moment << ")";
    throw SimulationFault(msg.str());
  }
  return out;
}

namespace {

Eigen::Matrix3d make3(const std::vector<double>& v, const std::string& key) {
  if (v.size() != 9)
    throw std::invalid_argument("ship config: key '" + key + "' expects 9 values (3x3 row-major)");
  Eigen::Matrix3d m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return m;
}

}  // namespace

VesselModel VesselModel::from_config_text(const std::string& text) {
  std::map<std::string, std::vector<double>> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<double> vals;
    double x;
    while (ls >> x) vals.push_back(x);
    if (vals.empty())
      throw std::invalid_argument("ship config line " + std::to_string(lineno) +
                                  ": key '" + key + "' has no numeric values");
    entries[key] = std::move(vals);
  }

  auto scalar = [&](const std::string& key, double fallback, bool required = false) {
    auto it = entries.find(key);
    if (it == entries.end()) {
      if (required) throw std::invalid_argument("ship config: missing required key '" + key + "'");
      return fallback;
    }
    if (it->second.size() != 1)
      throw std::invalid_argument("ship config: key '" + key + "' expects a single value");
    return it->second[0];
  };

  VesselModel m;
  auto it = entries.find("mass_matrix");
  if (it == entries.end()) throw std::invalid_argument("ship config: missing required key 'mass_matrix'");
  m.mass = make3(it->second, "mass_matrix");
  auto mat = [&](const std::string& key, const Eigen::Matrix3d& fallback) {
    auto e = entries.find(key);
    return e == entries.end() ? fallback : make3(e->second, key);
  };
  m.damping_linear = mat("damping_linear", Eigen::Matrix3d::Zero());
  m.damping_quad_u = mat("damping_quad_u", Eigen::Matrix3d::Zero());
  m.damping_quad_v = mat("damping_quad_v", Eigen::Matrix3d::Zero());
  m.damping_quad_r = mat("damping_quad_r", Eigen::Matrix3d::Zero());

  auto act = entries.find("actuator_matrix");
  if (act != entries.end()) {
    if (act->second.size() != 6)
      throw std::invalid_argument("ship config: 'actuator_matrix' expects 6 values (3x2 row-major)");
    const auto& v = act->second;
    m.actuation << v[0], v[1], v[2], v[3], v[4], v[5];
  } else {
    m.actuation << 1, 0, 0, 0, 0, 1;
  }

  m.length = scalar("length", m.length, true);
  m.width = scalar("width", m.width, true);
  m.max_speed = scalar("max_speed", m.max_speed);
  m.max_surge_force = scalar("max_surge_force", m.max_surge_force);
  m.max_yaw_moment = scalar("max_yaw_moment", m.max_yaw_moment);

  m.validate();
  m.mass_inv = m.mass.inverse();
  return m;
}

VesselModel VesselModel::from_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("ship config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_config_text(ss.str());
}

VesselModel VesselModel::default_model() {
  // Model-scale supply ship (1:70): 23.8 kg, 1.255 m, with added mass and
  // linear-plus-modulus damping in the usual maneuvering form. Limits are
  // sized so the bundled max_speed is actually attainable in steady state.
  static const char* kConfig = R"(
mass_matrix      25.8 0 0   0 33.8 1.0948   0 1.0948 2.76
damping_linear   0.72253 0 0   0 0.88965 7.25   0 -0.0313 1.9
damping_quad_u   1.32742 0 0   0 0 0   0 0 0
damping_quad_v   0 0 0   0 36.47287 0.845   0 -3.95645 -0.08
damping_quad_r   0 0 0   0 0.805 3.45   0 -0.13 0.75
actuator_matrix  1 0   0 0   0 1
length           1.255
width            0.29
max_speed        2.0
max_surge_force  7.0
max_yaw_moment   1.5
)";
  return from_config_text(kConfig);
}

}  // namespace asv
