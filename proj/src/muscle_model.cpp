#include "musclework/muscle_model.hpp"

#include "musclework/error.hpp"
#include "musclework/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace musclework {

namespace {

constexpr std::array<std::string_view, kMuscleGroupCount> kGroupNames = {
    "deltoideus",      "pectoralis_major", "triceps_brachii", "biceps_brachii_brachialis",
    "latissimus_dorsi", "gluteus_maximus", "ischiocrurales",  "quadriceps_femoris",
};

constexpr double kFdStep = 1e-5;

using nlohmann::json;

double require_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) throw SchemaError(where + ": '" + key + "' missing or not a number");
  return it->get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw SchemaError(where + ": '" + key + "' is not a number");
  return it->get<double>();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw SchemaError(where + ": '" + key + "' missing or not a string");
  return it->get<std::string>();
}

MuscleDefinition parse_muscle(const json& j, double specific_tension, std::size_t idx) {
  std::string where = "muscles[" + std::to_string(idx) + "]";
  if (!j.is_object()) throw SchemaError(where + ": not an object");
  MuscleDefinition m;
  m.name = require_string(j, "name", where);
  where += " (" + m.name + ")";

  const std::string group = require_string(j, "group", where);
  auto g = group_from_name(group);
  if (!g) throw SchemaError(where + ": unknown group '" + group + "'");
  m.group = *g;

  const std::string side = require_string(j, "side", where);
  if (side == "L") {
    m.side = Side::Left;
  } else if (side == "R") {
    m.side = Side::Right;
  } else {
    throw SchemaError(where + ": side must be \"L\" or \"R\"");
  }

  auto att = j.find("attachments");
  if (att == j.end() || !att->is_array()) throw SchemaError(where + ": 'attachments' missing");
  for (const auto& a : *att) {
    const std::string seg = require_string(a, "segment", where);
    auto sid = segment_from_name(seg);
    if (!sid) throw SchemaError(where + ": unknown segment '" + seg + "'");
    auto pt = a.find("point");
    if (pt == a.end() || !pt->is_array() || pt->size() != 3) throw SchemaError(where + ": attachment point must be [x,y,z]");
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      if (!(*pt)[k].is_number()) throw SchemaError(where + ": attachment point must be numeric");
      p[k] = (*pt)[k].get<double>();
    }
    if (!p.allFinite()) throw SchemaError(where + ": attachment point not finite");
    m.attachments.push_back({*sid, p});
  }
  if (m.attachments.size() < 2) throw SchemaError(where + ": needs at least 2 attachments");

  auto dofs = j.find("spanned_dofs");
  if (dofs == j.end() || !dofs->is_array() || dofs->empty()) throw SchemaError(where + ": 'spanned_dofs' missing or empty");
  for (const auto& d : *dofs) {
    if (!d.is_string()) throw SchemaError(where + ": spanned_dofs entries must be strings");
    auto id = dof_from_name(d.get<std::string>());
    if (!id) throw SchemaError(where + ": unknown DOF '" + d.get<std::string>() + "'");
    if (!m.spans(*id)) m.spanned_dofs.push_back(*id);
  }

  const double l0 = require_number(j, "l0", where);
  m.pcsa_cm2 = optional_number(j, "pcsa_cm2", where);
  double f_max = 0.0;
  if (m.pcsa_cm2) {
    if (!(*m.pcsa_cm2 > 0.0)) throw SchemaError(where + ": pcsa_cm2 must be positive");
    f_max = *m.pcsa_cm2 * specific_tension;
  } else {
    f_max = require_number(j, "f_max", where);
  }
  if (!(f_max > 0.0) || !(l0 > 0.0)) throw SchemaError(where + ": f_max and l0 must be positive");

  m.hill = HillParameters::with_defaults(f_max, l0);
  if (auto v = optional_number(j, "v_max", where)) {
    m.hill.v_max = *v;
    m.hill.b = 0.25 * *v;
  }
  if (auto a = optional_number(j, "a", where)) m.hill.a = *a;
  if (auto b = optional_number(j, "b", where)) m.hill.b = *b;
  if (!(m.hill.v_max > 0.0 && m.hill.a > 0.0 && m.hill.b > 0.0)) throw SchemaError(where + ": Hill constants must be positive");

  const double lhs = m.hill.a * m.hill.v_max;
  const double rhs = m.hill.b * m.hill.f_max;
  if (std::abs(lhs - rhs) > 1e-6 * std::max(std::abs(lhs), std::abs(rhs))) {
    const double repaired = lhs / m.hill.f_max;
    log().warn("{}: a*v_max != b*f_max, rescaling b from {} to {}", m.name, m.hill.b, repaired);
    m.hill.b = repaired;
  }
  return m;
}

} // namespace

std::string_view group_name(MuscleGroup g) { return kGroupNames[static_cast<std::size_t>(g)]; }

std::optional<MuscleGroup> group_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kMuscleGroupCount; ++i) {
    if (kGroupNames[i] == name) return static_cast<MuscleGroup>(i);
  }
  return std::nullopt;
}

bool is_upper_limb(MuscleGroup g) { return static_cast<int>(g) <= static_cast<int>(MuscleGroup::LatissimusDorsi); }

HillParameters HillParameters::with_defaults(double f_max, double l0) {
  HillParameters p;
  p.f_max = f_max;
  p.l0 = l0;
  p.v_max = 10.0 * l0;
  p.a = 0.25 * f_max;
  p.b = 0.25 * p.v_max;
  return p;
}

void HillParameters::validate() const {
  if (!(f_max > 0.0 && v_max > 0.0 && a > 0.0 && b > 0.0 && l0 > 0.0)) {
    throw SchemaError("Hill parameters must all be positive");
  }
  const double lhs = a * v_max, rhs = b * f_max;
  if (std::abs(lhs - rhs) > 1e-6 * std::max(lhs, rhs)) throw SchemaError("Hill parameters violate a*v_max = b*f_max");
}

bool MuscleDefinition::spans(DofId d) const {
  return std::find(spanned_dofs.begin(), spanned_dofs.end(), d) != spanned_dofs.end();
}

std::optional<std::size_t> MusculoskeletalModel::find(std::string_view name) const {
  for (std::size_t i = 0; i < muscles.size(); ++i) {
    if (muscles[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<DofId> MusculoskeletalModel::actuated_dofs() const {
  std::vector<DofId> out;
  for (std::size_t j = 0; j < kDofCount; ++j) {
    const auto d = static_cast<DofId>(j);
    if (std::any_of(muscles.begin(), muscles.end(), [d](const MuscleDefinition& m) { return m.spans(d); })) {
      out.push_back(d);
    }
  }
  return out;
}

MusculoskeletalModel load_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("model: top level must be an object");

  MusculoskeletalModel model;
  model.version = doc.value("version", std::string("unversioned"));
  if (auto st = optional_number(doc, "specific_tension", "model")) model.specific_tension = *st;
  if (!(model.specific_tension > 0.0)) throw SchemaError("model: specific_tension must be positive");

  if (auto frames = doc.find("segment_frames"); frames != doc.end()) {
    if (!frames->is_object()) throw SchemaError("model: segment_frames must be an object");
    for (const auto& [name, _] : frames->items()) {
      if (!segment_from_name(name)) throw SchemaError("model: segment_frames names unknown segment '" + name + "'");
    }
  }

  auto muscles = doc.find("muscles");
  if (muscles == doc.end() || !muscles->is_array()) throw SchemaError("model: 'muscles' array missing");
  std::set<std::string> names;
  for (std::size_t i = 0; i < muscles->size(); ++i) {
    MuscleDefinition m = parse_muscle((*muscles)[i], model.specific_tension, i);
    if (!names.insert(m.name).second) throw DuplicateMuscle("model: duplicate muscle '" + m.name + "'");
    model.muscles.push_back(std::move(m));
  }

  for (std::size_t g = 0; g < kMuscleGroupCount; ++g) {
    for (Side side : {Side::Left, Side::Right}) {
      const bool covered = std::any_of(model.muscles.begin(), model.muscles.end(), [&](const MuscleDefinition& m) {
        return static_cast<std::size_t>(m.group) == g && m.side == side;
      });
      if (!covered) {
        throw UncoveredGroup(std::string("model: no muscle for ") + (side == Side::Left ? "left " : "right ") +
                             std::string(kGroupNames[g]));
      }
    }
  }
  return model;
}

MusculoskeletalModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("model: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

double muscle_length(const MuscleDefinition& m, const Pose& pose) {
  double len = 0.0;
  Vec3 prev;
  for (std::size_t i = 0; i < m.attachments.size(); ++i) {
    const Attachment& a = m.attachments[i];
    if (!pose.has(a.segment)) {
      throw MissingSegment(m.name + ": pose lacks segment " + std::string(segment_name(a.segment)));
    }
    const Vec3 w = pose.segment(a.segment).to_world(a.local);
    if (i > 0) len += (w - prev).norm();
    prev = w;
  }
  return len;
}

double moment_arm(const MuscleDefinition& m, const DofVector& angles, const BodyScale& scale, DofId dof) {
  if (!m.spans(dof)) throw DofNotSpanned(m.name + " does not span " + std::string(dof_name(dof)));
  DofVector plus = angles, minus = angles;
  plus[index(dof)] += kFdStep;
  minus[index(dof)] -= kFdStep;
  const double lp = muscle_length(m, forward_pose(plus, scale));
  const double lm = muscle_length(m, forward_pose(minus, scale));
  return -(lp - lm) / (2.0 * kFdStep);
}

double force_velocity(double v, const HillParameters& p) {
  if (v <= 0.0) return p.f_max;
  if (v >= p.v_max) return 0.0;
  const double f = (p.f_max + p.a) * p.b / (v + p.b) - p.a;
  return std::max(f, 0.0);
}

ForceLength force_length(double l, const HillParameters& p) {
  ForceLength out;
  const double x = (l - 1.0) / 0.45;
  out.active = std::exp(-x * x);
  out.passive = l > 1.0 ? p.f_max * 0.05 * (std::exp(5.0 * (l - 1.0)) - 1.0) : 0.0;
  return out;
}

MuscleStateFrame compute_muscle_states(const MusculoskeletalModel& model, const JointAngleFrame& q,
                                       const BodyScale& scale, double length_scale) {
  MuscleStateFrame out;
  out.t_ms = q.t_ms;
  out.muscles.resize(model.size());
  const Pose base = forward_pose(q.angles, scale);
  for (std::size_t i = 0; i < model.size(); ++i) {
    out.muscles[i].length = muscle_length(model.muscles[i], base);
    out.muscles[i].norm_length = out.muscles[i].length / (model.muscles[i].hill.l0 * length_scale);
  }
  for (DofId d : model.actuated_dofs()) {
    DofVector plus = q.angles, minus = q.angles;
    plus[index(d)] += kFdStep;
    minus[index(d)] -= kFdStep;
    const Pose pp = forward_pose(plus, scale);
    const Pose pm = forward_pose(minus, scale);
    for (std::size_t i = 0; i < model.size(); ++i) {
      const MuscleDefinition& m = model.muscles[i];
      if (!m.spans(d)) continue;
      const double r = -(muscle_length(m, pp) - muscle_length(m, pm)) / (2.0 * kFdStep);
      out.muscles[i].moment_arms[index(d)] = r;
      out.muscles[i].velocity += r * q.velocities[index(d)];
    }
  }
  return out;
}

} // namespace musclework
