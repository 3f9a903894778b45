#include "musclework/export.hpp"

#include "musclework/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

namespace musclework {

namespace {

using ojson = nlohmann::ordered_json;

ojson rgb_json(const Rgb& c) { return ojson::array({c.r, c.g, c.b}); }

ojson limbs_json(const LimbWork& l) {
  ojson j;
  j["left_upper"] = round9(l.left_upper);
  j["right_upper"] = round9(l.right_upper);
  j["left_lower"] = round9(l.left_lower);
  j["right_lower"] = round9(l.right_lower);
  j["overall"] = round9(l.overall);
  return j;
}

} // namespace

std::string summary_json(const SessionResult& r, const MusculoskeletalModel& model) {
  const SessionSummary& s = r.summary;
  ojson j;
  j["model_version"] = model.version;
  j["duration_s"] = round9(s.duration_s);
  j["frame_count"] = s.frame_count;
  j["infeasible_frames"] = s.infeasible_frames;
  j["stature_m"] = round9(r.scale.stature);
  ojson skipped = ojson::array();
  for (DofId d : r.skipped_dofs) skipped.push_back(std::string(dof_name(d)));
  j["skipped_dofs"] = skipped;
  ojson muscles = ojson::object();
  for (std::size_t m = 0; m < s.muscle_names.size(); ++m) muscles[s.muscle_names[m]] = round9(s.muscle_work[m]);
  j["muscles"] = muscles;
  ojson groups = ojson::object();
  for (std::size_t k = 0; k < kGroupSideCount; ++k) {
    groups[group_label(k)] = {{"work", round9(s.group_work[k])}, {"peak_window", round9(s.peak_window[k])}};
  }
  j["groups"] = groups;
  j["limbs"] = limbs_json(s.limbs);
  return j.dump(2) + "\n";
}

std::string groups_csv(const SessionResult& r) {
  std::ostringstream out;
  out << "t_ms";
  for (std::size_t k = 0; k < kGroupSideCount; ++k) out << ',' << group_label(k);
  out << ",left_upper,right_upper,left_lower,right_lower,overall\n";
  for (std::size_t i = 0; i < r.groups.size(); ++i) {
    out << r.groups[i].t_ms;
    for (double v : r.groups[i].values) out << ',' << fmt9(v);
    const LimbWork& l = r.limbs[i].limbs;
    out << ',' << fmt9(l.left_upper) << ',' << fmt9(l.right_upper) << ',' << fmt9(l.left_lower) << ','
        << fmt9(l.right_lower) << ',' << fmt9(l.overall) << '\n';
  }
  return out.str();
}

std::string heatmap_json(const SessionResult& r, const ColorAnchors& anchors) {
  const SessionSummary& s = r.summary;
  const double top = *std::max_element(s.group_work.begin(), s.group_work.end());
  ojson j;
  j["t_ms"] = r.display.empty() ? 0 : r.display.back().t_ms;
  ojson groups = ojson::object();
  for (std::size_t k = 0; k < kGroupSideCount; ++k) {
    ojson g;
    if (!r.display.empty()) {
      const DisplayFrame& d = r.display.back();
      g["window_median"] = round9(d.window_median[k]);
      g["normalized"] = round9(d.normalized[k]);
      g["rgb"] = rgb_json(d.rgb[k]);
    } else {
      g["window_median"] = 0.0;
      g["normalized"] = 0.0;
      g["rgb"] = rgb_json(color_map(0.0, anchors));
    }
    const double acc = top > 0.0 ? s.group_work[k] / top : 0.0;
    g["session_normalized"] = round9(acc);
    g["session_rgb"] = rgb_json(color_map(acc, anchors));
    groups[group_label(k)] = g;
  }
  j["groups"] = groups;
  return j.dump(2) + "\n";
}

std::string limbs_svg(const LimbWork& l) {
  struct Bar {
    const char* label;
    double value;
    const char* color;
  };
  const Bar bars[] = {
      {"left upper", l.left_upper, "#1f4fd8"},   {"right upper", l.right_upper, "#1a9e3a"},
      {"left lower", l.left_lower, "#e8d020"},   {"right lower", l.right_lower, "#d82020"},
      {"overall", l.overall, "#ffffff"},
  };
  const double top = std::max(l.overall, 1e-12);
  constexpr double kLeft = 60, kBottom = 340, kHeight = 280, kSlot = 140, kWidth = 90;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" viewBox=\"0 0 800 400\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"#303030\"/>\n";
  out << "<text x=\"400\" y=\"30\" fill=\"#ffffff\" font-family=\"sans-serif\" font-size=\"18\" "
         "text-anchor=\"middle\">Accumulated muscle work (N*s)</text>\n";
  out << "<line x1=\"" << kLeft - 10 << "\" y1=\"" << kBottom << "\" x2=\"780\" y2=\"" << kBottom
      << "\" stroke=\"#c0c0c0\"/>\n";
  for (std::size_t i = 0; i < std::size(bars); ++i) {
    const double h = std::max(0.0, bars[i].value) / top * kHeight;
    const double x = kLeft + kSlot * static_cast<double>(i) + (kSlot - kWidth) / 2.0;
    out << "<rect x=\"" << fmt9(x) << "\" y=\"" << fmt9(kBottom - h) << "\" width=\"" << fmt9(kWidth)
        << "\" height=\"" << fmt9(h) << "\" fill=\"" << bars[i].color << "\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << fmt9(x + kWidth / 2.0) << "\" y=\"" << fmt9(kBottom - h - 6)
        << "\" fill=\"#ffffff\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
        << fmt9(round9(bars[i].value)) << "</text>\n";
    out << "<text x=\"" << fmt9(x + kWidth / 2.0) << "\" y=\"" << fmt9(kBottom + 20)
        << "\" fill=\"#ffffff\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" << bars[i].label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string summary_line(const SessionSummary& s) {
  std::vector<std::size_t> order(kGroupSideCount);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.group_work[a] > s.group_work[b]; });
  std::string line = "overall " + fmt9(round9(s.limbs.overall)) + " N*s; top groups:";
  for (std::size_t i = 0; i < 3; ++i) {
    line += (i == 0 ? " " : ", ") + group_label(order[i]) + " (" + fmt9(round9(s.group_work[order[i]])) + ")";
  }
  return line;
}

} // namespace musclework
