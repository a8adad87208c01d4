#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "tamperscope/core/error.hpp"
#include "tamperscope/detectors.hpp"
#include "tamperscope/synth/corpora.hpp"
#include "tamperscope/synth/forgery.hpp"

namespace tamperscope::harness {

using json = nlohmann::ordered_json;

namespace detail {

/// 1-based line of the first occurrence of "key" in the source, 0 if absent.
inline int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

inline std::string where(int line) {
  return line > 0 ? "spec line " + std::to_string(line) : std::string("spec");
}

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

struct FieldError {
  std::string field;
  std::string message;
};

[[noreturn]] inline void bad_field(const std::string& field, const std::string& msg) {
  throw FieldError{field, msg};
}

inline int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad_field(field, "expected an integer");
  return j.get<int>();
}

inline double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  return j.get<double>();
}

inline std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) bad_field(field, "expected a string");
  return j.get<std::string>();
}

inline synth::BaseContent parse_base(const json& j, const std::string& field) {
  const std::string s = get_string(j, field);
  using synth::BaseContent;
  for (BaseContent b : {BaseContent::Gradient, BaseContent::Texture,
                        BaseContent::DemosaicedRggb, BaseContent::NoiseOverSmooth})
    if (s == synth::to_string(b)) return b;
  bad_field(field, "unknown base content '" + s + "'");
}

inline synth::ForgeryOp parse_op(const json& j, const std::string& field) {
  const std::string s = get_string(j, field);
  using synth::ForgeryOp;
  for (ForgeryOp o : {ForgeryOp::None, ForgeryOp::Splice, ForgeryOp::CopyMove,
                      ForgeryOp::BlurRegion, ForgeryOp::NoiseRegion,
                      ForgeryOp::GridShiftRegion})
    if (s == synth::to_string(o)) return o;
  bad_field(field, "unknown forgery op '" + s + "'");
}

inline synth::Rect parse_rect(const json& j, const std::string& field) {
  if (!j.is_object()) bad_field(field, "expected an object {x, y, w, h}");
  synth::Rect r;
  for (const char* k : {"x", "y", "w", "h"})
    if (!j.contains(k)) bad_field(field + "." + k, "missing");
  r.x = get_int(j["x"], field + ".x");
  r.y = get_int(j["y"], field + ".y");
  r.w = get_int(j["w"], field + ".w");
  r.h = get_int(j["h"], field + ".h");
  return r;
}

inline std::vector<synth::ChainStep> parse_chain(const json& j,
                                                 const std::string& field) {
  if (!j.is_array()) bad_field(field, "expected an array of steps");
  std::vector<synth::ChainStep> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const json& s = j[i];
    if (!s.is_object() || s.size() != 1)
      bad_field(f, "expected {\"jpeg\": q} or {\"resize\": factor}");
    if (s.contains("jpeg")) out.push_back(synth::ChainStep::jpeg(get_int(s["jpeg"], f + ".jpeg")));
    else if (s.contains("resize"))
      out.push_back(synth::ChainStep::resize(get_number(s["resize"], f + ".resize")));
    else bad_field(f, "unknown step kind '" + s.begin().key() + "'");
  }
  return out;
}

}  // namespace detail

/// Parses a corpus spec document. Keys mirror SynthSpec; "preset" names a
/// detector whose matched corpus template is the starting point. Errors
/// carry the line and the field path.
inline synth::SynthSpec parse_synth_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, detail::where(detail::line_of_offset(text, e.byte)) +
                               ": malformed JSON (" + e.what() + ")");
  }
  require(j.is_object(), ErrorKind::Parse, "spec line 1: expected a JSON object");
  synth::SynthSpec s;
  auto locate = [&](const std::string& field) {
    const std::string key = field.substr(0, field.find_first_of(".[/"));
    return detail::line_of_key(text, key);
  };
  try {
    if (j.contains("preset")) {
      const std::string p = detail::get_string(j["preset"], "preset");
      const auto algo = parse_algo(p);
      if (!algo) detail::bad_field("preset", "unknown detector '" + p + "'");
      s = synth::matched_template(*algo);
    }
    for (const auto& [key, v] : j.items()) {
      if (key == "preset") continue;
      else if (key == "width") s.width = detail::get_int(v, key);
      else if (key == "height") s.height = detail::get_int(v, key);
      else if (key == "channels") s.channels = detail::get_int(v, key);
      else if (key == "base") s.base = detail::parse_base(v, key);
      else if (key == "donorBase") s.donorBase = detail::parse_base(v, key);
      else if (key == "op") s.op = detail::parse_op(v, key);
      else if (key == "region") s.region = detail::parse_rect(v, key);
      else if (key == "source") s.source = detail::parse_rect(v, key);
      else if (key == "hostChain") s.hostChain = detail::parse_chain(v, key);
      else if (key == "donorChain") s.donorChain = detail::parse_chain(v, key);
      else if (key == "post") s.post = detail::parse_chain(v, key);
      else if (key == "strength") s.strength = detail::get_number(v, key);
      else if (key == "hostNoise") s.hostNoise = detail::get_number(v, key);
      else if (key == "seed") {
        if (!v.is_number_unsigned() && !v.is_number_integer())
          detail::bad_field(key, "expected an unsigned integer");
        s.seed = v.get<std::uint64_t>();
      } else detail::bad_field(key, "unknown key");
    }
  } catch (const detail::FieldError& e) {
    fail(ErrorKind::Parse, detail::where(locate(e.field)) + ": field '" + e.field + "': " + e.message);
  }
  try {
    synth::validate(s);
  } catch (const Error& e) {
    // validate() prefixes messages with the offending field name.
    const std::string msg = e.what();
    const std::string field = msg.substr(0, msg.find(':'));
    fail(ErrorKind::Argument, detail::where(locate(field)) + ": field '" + field + "'" +
                                  msg.substr(std::min(msg.size(), field.size())));
  }
  return s;
}

inline json chain_to_json(const std::vector<synth::ChainStep>& c) {
  json a = json::array();
  for (const auto& st : c)
    a.push_back(st.kind == synth::ChainStep::Kind::Jpeg ? json{{"jpeg", st.quality}}
                                                        : json{{"resize", st.factor}});
  return a;
}

inline json synth_spec_to_json(const synth::SynthSpec& s) {
  json j{{"width", s.width},
         {"height", s.height},
         {"channels", s.channels},
         {"base", synth::to_string(s.base)},
         {"op", synth::to_string(s.op)},
         {"hostChain", chain_to_json(s.hostChain)},
         {"donorChain", chain_to_json(s.donorChain)},
         {"post", chain_to_json(s.post)},
         {"strength", s.strength},
         {"hostNoise", s.hostNoise},
         {"seed", s.seed}};
  if (s.donorBase) j["donorBase"] = synth::to_string(*s.donorBase);
  auto rect = [](const synth::Rect& r) {
    return json{{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}};
  };
  if (!s.region.empty()) j["region"] = rect(s.region);
  if (!s.source.empty()) j["source"] = rect(s.source);
  return j;
}

}  // namespace tamperscope::harness
