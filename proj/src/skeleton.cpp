#include "musclework/skeleton.hpp"

#include "musclework/error.hpp"
#include "musclework/format.hpp"
#include "musclework/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace musclework {

namespace {

constexpr std::array<std::string_view, kJointCount> kNames = {
    "PELVIS",     "SPINE_NAVEL", "SPINE_CHEST", "NECK",       "HEAD",    "CLAVICLE_L", "SHOULDER_L",
    "ELBOW_L",    "WRIST_L",     "HIP_L",       "KNEE_L",     "ANKLE_L", "FOOT_L",     "CLAVICLE_R",
    "SHOULDER_R", "ELBOW_R",     "WRIST_R",     "HIP_R",      "KNEE_R",  "ANKLE_R",    "FOOT_R",
};

// Body Tracking SDK names for the retained joints, same order as kNames. The
// SDK's HAND/HANDTIP/THUMB, NOSE, EYE and EAR joints have no counterpart.
constexpr std::array<std::string_view, kJointCount> kKinectNames = {
    "PELVIS",         "SPINE_NAVEL", "SPINE_CHEST", "NECK",       "HEAD",       "CLAVICLE_LEFT",
    "SHOULDER_LEFT",  "ELBOW_LEFT",  "WRIST_LEFT",  "HIP_LEFT",   "KNEE_LEFT",  "ANKLE_LEFT",
    "FOOT_LEFT",      "CLAVICLE_RIGHT", "SHOULDER_RIGHT", "ELBOW_RIGHT", "WRIST_RIGHT", "HIP_RIGHT",
    "KNEE_RIGHT",     "ANKLE_RIGHT", "FOOT_RIGHT",
};

constexpr std::array<JointId, kJointCount> kParent = {
    JointId::Pelvis,     // pelvis (root, unused)
    JointId::Pelvis,     JointId::SpineNavel, JointId::SpineChest, JointId::Neck,
    JointId::SpineChest, JointId::ClavicleL,  JointId::ShoulderL,  JointId::ElbowL,
    JointId::Pelvis,     JointId::HipL,       JointId::KneeL,      JointId::AnkleL,
    JointId::SpineChest, JointId::ClavicleR,  JointId::ShoulderR,  JointId::ElbowR,
    JointId::Pelvis,     JointId::HipR,       JointId::KneeR,      JointId::AnkleR,
};

using nlohmann::json;

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

Vec3 read_triple(const json& j, const std::string& name, std::size_t line) {
  if (!j.is_array() || j.size() != 3) throw MalformedRecord("joint " + name + " is not [x,y,z]", line);
  Vec3 p;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw MalformedRecord("joint " + name + " has a non-numeric component", line);
    p[k] = j[k].get<double>();
    if (!std::isfinite(p[k])) throw MalformedRecord("joint " + name + " is not finite", line);
  }
  return p;
}

SkeletonFrame parse_record(const json& rec, StreamFormat format, std::size_t line) {
  if (!rec.is_object()) throw MalformedRecord("record is not an object", line);
  auto t = rec.find("t_ms");
  if (t == rec.end() || !t->is_number_integer()) throw MalformedRecord("t_ms missing or not an integer", line);
  SkeletonFrame f;
  f.t_ms = t->get<std::int64_t>();
  if (f.t_ms < 0) throw MalformedRecord("t_ms is negative", line);

  auto joints = rec.find("joints");
  if (joints == rec.end() || !joints->is_object()) throw MalformedRecord("joints missing", line);
  const auto& names = format == StreamFormat::CanonicalJsonl ? kNames : kKinectNames;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const std::string name(names[i]);
    auto it = joints->find(name);
    if (it == joints->end()) throw MissingJoint(name, line);
    f.positions[i] = read_triple(*it, name, line);
  }

  auto conf = rec.find("conf");
  if (conf != rec.end() && !conf->is_null()) {
    if (!conf->is_object()) throw MalformedRecord("conf is not an object", line);
    for (std::size_t i = 0; i < kJointCount; ++i) {
      auto it = conf->find(std::string(names[i]));
      if (it == conf->end()) continue;
      if (!it->is_number()) throw MalformedRecord("conf value is not a number", line);
      const double c = it->get<double>();
      if (!(c >= 0.0 && c <= 1.0)) throw MalformedRecord("conf value outside [0,1]", line);
      f.confidence[i] = c;
    }
  }
  return f;
}

double grid_time_ms(double t0, std::size_t i, double rate_hz) {
  return t0 + (static_cast<double>(i) * 1000.0) / rate_hz;
}

bool matches_rounded_grid(const SessionStream& s, double rate_hz) {
  const double t0 = static_cast<double>(s.frames.front().t_ms);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.frames[i].t_ms != std::llround(grid_time_ms(t0, i, rate_hz))) return false;
  }
  return true;
}

} // namespace

std::string_view joint_name(JointId j) { return kNames[index(j)]; }

std::optional<JointId> joint_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kNames[i] == name) return static_cast<JointId>(i);
  }
  return std::nullopt;
}

const std::array<Bone, kBoneCount>& bones() {
  static const std::array<Bone, kBoneCount> table = [] {
    std::array<Bone, kBoneCount> b{};
    for (std::size_t i = 1; i < kJointCount; ++i) b[i - 1] = {kParent[i], static_cast<JointId>(i)};
    return b;
  }();
  return table;
}

std::optional<std::size_t> bone_to(JointId child) {
  if (child == JointId::Pelvis) return std::nullopt;
  return index(child) - 1;
}

double SessionStream::time_s(std::size_t i) const {
  if (uniform()) return grid_time_ms(t0_ms, i, rate_hz) / 1000.0;
  return static_cast<double>(frames.at(i).t_ms) / 1000.0;
}

double BodyScale::length(JointId child) const { return lengths[*bone_to(child)]; }

BodyScale BodyScale::reference() {
  BodyScale b;
  auto set = [&b](JointId child, double len) { b.lengths[*bone_to(child)] = len; };
  set(JointId::SpineNavel, 0.22);
  set(JointId::SpineChest, 0.22);
  set(JointId::Neck, 0.12);
  set(JointId::Head, 0.16);
  for (auto [clav, sh, el, wr, hip, knee, ank, foot] :
       {std::array{JointId::ClavicleL, JointId::ShoulderL, JointId::ElbowL, JointId::WristL, JointId::HipL,
                   JointId::KneeL, JointId::AnkleL, JointId::FootL},
        std::array{JointId::ClavicleR, JointId::ShoulderR, JointId::ElbowR, JointId::WristR, JointId::HipR,
                   JointId::KneeR, JointId::AnkleR, JointId::FootR}}) {
    set(clav, 0.08);
    set(sh, 0.14);
    set(el, 0.30);
    set(wr, 0.26);
    set(hip, 0.10);
    set(knee, 0.43);
    set(ank, 0.42);
    set(foot, 0.15);
  }
  b.stature = 0.22 + 0.22 + 0.12 + 0.16 + 0.43 + 0.42;
  return b;
}

BodyScale BodyScale::scaled(double factor) const {
  BodyScale b = *this;
  for (auto& l : b.lengths) l *= factor;
  b.stature *= factor;
  return b;
}

SessionStream parse_session(std::string_view text, StreamFormat format) {
  SessionStream s;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedRecord("invalid JSON", line_no);
    }
    SkeletonFrame f = parse_record(rec, format, line_no);
    if (!s.frames.empty() && f.t_ms <= s.frames.back().t_ms) throw NonMonotonicTimestamp(line_no);
    s.frames.push_back(f);
    if (end == text.size()) break;
  }
  return s;
}

std::string serialize_session(const SessionStream& s) {
  std::ostringstream out;
  for (const auto& f : s.frames) {
    out << "{\"t_ms\":" << f.t_ms << ",\"joints\":{";
    for (std::size_t i = 0; i < kJointCount; ++i) {
      if (i) out << ',';
      const Vec3& p = f.positions[i];
      out << '"' << kNames[i] << "\":[" << fmt9(p.x()) << ',' << fmt9(p.y()) << ',' << fmt9(p.z()) << ']';
    }
    out << '}';
    const bool all_one = std::all_of(f.confidence.begin(), f.confidence.end(), [](double c) { return c == 1.0; });
    if (!all_one) {
      out << ",\"conf\":{";
      for (std::size_t i = 0; i < kJointCount; ++i) {
        if (i) out << ',';
        out << '"' << kNames[i] << "\":" << fmt9(f.confidence[i]);
      }
      out << '}';
    }
    out << "}\n";
  }
  return out.str();
}

SessionStream resample(const SessionStream& s, double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw InvalidArgument("rate_hz must be positive");
  if (s.size() < 2) throw TooFewFrames(s.size(), 2);

  if ((s.uniform() && s.rate_hz == rate_hz) || (!s.uniform() && matches_rounded_grid(s, rate_hz))) {
    SessionStream out = s;
    out.rate_hz = rate_hz;
    out.t0_ms = s.uniform() ? s.t0_ms : static_cast<double>(s.frames.front().t_ms);
    return out;
  }

  std::vector<double> knots(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) knots[i] = s.time_s(i) * 1000.0;
  const double t_first = knots.front();
  const double t_last = knots.back();
  const auto count = static_cast<std::size_t>(std::floor((t_last - t_first) * rate_hz / 1000.0 + 1e-9)) + 1;

  SessionStream out;
  out.rate_hz = rate_hz;
  out.t0_ms = t_first;
  out.frames.resize(count);
  std::size_t k = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = std::min(grid_time_ms(t_first, i, rate_hz), t_last);
    while (k + 1 < knots.size() && knots[k + 1] <= t) ++k;
    SkeletonFrame& f = out.frames[i];
    f.t_ms = std::llround(t);
    const SkeletonFrame& a = s.frames[k];
    if (k + 1 == knots.size() || t == knots[k]) {
      f.positions = a.positions;
      f.confidence = a.confidence;
      continue;
    }
    const SkeletonFrame& b = s.frames[k + 1];
    const double alpha = (t - knots[k]) / (knots[k + 1] - knots[k]);
    for (std::size_t j = 0; j < kJointCount; ++j) {
      f.positions[j] = a.positions[j] + alpha * (b.positions[j] - a.positions[j]);
      f.confidence[j] = std::min(a.confidence[j], b.confidence[j]);
    }
  }
  return out;
}

SessionStream smooth(const SessionStream& s, std::size_t window_frames) {
  if (window_frames == 0 || window_frames % 2 == 0) throw InvalidArgument("window_frames must be odd and positive");
  if (window_frames > s.size()) {
    throw WindowTooLarge("window of " + std::to_string(window_frames) + " frames exceeds stream length " +
                         std::to_string(s.size()));
  }
  const std::size_t n = s.size();
  const std::size_t half = window_frames / 2;
  SessionStream out = s;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    for (std::size_t j = 0; j < kJointCount; ++j) {
      Vec3 acc = Vec3::Zero();
      for (std::size_t k = i - h; k <= i + h; ++k) acc += s.frames[k].positions[j];
      out.frames[i].positions[j] = acc / static_cast<double>(2 * h + 1);
    }
  }
  return out;
}

BodyScale estimate_body_scale(const SessionStream& s) {
  constexpr std::size_t kMinFrames = 30;
  if (s.size() < kMinFrames) throw TooFewFrames(s.size(), kMinFrames);
  BodyScale scale;
  std::vector<double> samples(s.size());
  for (std::size_t b = 0; b < kBoneCount; ++b) {
    const Bone& bone = bones()[b];
    for (std::size_t i = 0; i < s.size(); ++i) samples[i] = (s.frames[i][bone.child] - s.frames[i][bone.parent]).norm();
    scale.lengths[b] = median_inplace(samples);
  }
  const auto len = [&scale](JointId j) { return scale.length(j); };
  const double leg_l = len(JointId::KneeL) + len(JointId::AnkleL);
  const double leg_r = len(JointId::KneeR) + len(JointId::AnkleR);
  scale.stature =
      len(JointId::SpineNavel) + len(JointId::SpineChest) + len(JointId::Neck) + len(JointId::Head) + 0.5 * (leg_l + leg_r);

  for (std::size_t j = index(JointId::ClavicleL); j <= index(JointId::FootL); ++j) {
    const auto left = static_cast<JointId>(j);
    const auto right = static_cast<JointId>(j + 8);
    const double l = len(left), r = len(right);
    if (std::abs(l - r) > 0.25 * std::max(l, r)) {
      log().warn("bone to {} and {} differ by more than 25% ({} vs {} m)", joint_name(left), joint_name(right), l, r);
    }
  }
  for (double l : scale.lengths) {
    if (!(l > 0.0)) throw DegeneratePose("zero-length bone in body scale estimate");
  }
  return scale;
}

} // namespace musclework
