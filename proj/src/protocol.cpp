#include <algorithm>
#include <array>
#include <cmath>
#include <nlohmann/json.hpp>

#include "covergen/errors.hpp"
#include "covergen/genai.hpp"

namespace covergen {

using nlohmann::json;

// ---------------------------------------------------------------------------
// base64 (RFC 4648, padded)

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_reverse() {
  std::array<int, 256> r{};
  for (auto& v : r) v = -1;
  for (int i = 0; i < 64; ++i) r[static_cast<unsigned char>(kAlphabet[i])] = i;
  return r;
}
constexpr auto kReverse = make_reverse();
}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (const std::size_t rest = bytes.size() - i; rest > 0) {
    std::uint32_t n = bytes[i] << 16;
    if (rest == 2) n |= bytes[i + 1] << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += rest == 2 ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw DecodeError("base64: length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::uint32_t n = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && last && k >= 2) {
        ++pad;
        n <<= 6;
        continue;
      }
      const int v = kReverse[static_cast<unsigned char>(c)];
      if (v < 0 || pad > 0) throw DecodeError("base64: invalid character");
      n = (n << 6) | static_cast<std::uint32_t>(v);
    }
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(n & 0xff));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wire messages

namespace protocol {

namespace {

json parse_object(std::string_view body) {
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("$", "body is not valid JSON");
  if (!j.is_object()) throw ProtocolError("$", "body is not a JSON object");
  return j;
}

const json& require(const json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) throw ProtocolError(field, "missing");
  return *it;
}

std::vector<std::string> string_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ProtocolError(field, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ProtocolError(field + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ProtocolError(field, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ProtocolError(field + "[" + std::to_string(i) + "]", "expected a finite number");
    const double v = j[i].get<double>();
    if (!std::isfinite(v)) throw ProtocolError(field + "[" + std::to_string(i) + "]", "expected a finite number");
    out.push_back(v);
  }
  return out;
}

int positive_int(const json& j, const char* field) {
  if (!j.is_number_integer() || j.get<std::int64_t>() <= 0 || j.get<std::int64_t>() > 1 << 15)
    throw ProtocolError(field, "expected a positive integer");
  return j.get<int>();
}

}  // namespace

std::string encode(const GenerateRequest& r) {
  return json{{"titles", r.titles}, {"seed", r.seed}, {"width", r.width}, {"height", r.height}}.dump();
}

std::string encode(const GenerateResponse& r) {
  json images = json::array();
  for (const auto& img : r.images) images.push_back({{"title_index", img.title_index}, {"png_base64", img.png_base64}});
  return json{{"images", images}}.dump();
}

std::string encode(const ScoreRequest& r) {
  json images = json::array();
  for (const auto& b64 : r.images_png_base64) images.push_back({{"png_base64", b64}});
  json j{{"images", images}};
  if (r.titles) j["titles"] = *r.titles;
  return j.dump();
}

std::string encode(const ScoreReport& r) {
  json j{{"unconditional", r.unconditional}};
  if (r.conditional) j["conditional"] = *r.conditional;
  return j.dump();
}

std::string encode(const Health& r) { return json{{"status", r.status}, {"model", r.model}}.dump(); }

std::string encode_error(std::string_view message) { return json{{"error", message}}.dump(); }

GenerateRequest decode_generate_request(std::string_view body) {
  const json j = parse_object(body);
  GenerateRequest r;
  r.titles = string_array(require(j, "titles"), "titles");
  const json& seed = require(j, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
    throw ProtocolError("seed", "expected an unsigned 64-bit integer");
  r.seed = seed.get<std::uint64_t>();
  r.width = positive_int(require(j, "width"), "width");
  r.height = positive_int(require(j, "height"), "height");
  return r;
}

GenerateResponse decode_generate_response(std::string_view body) {
  const json j = parse_object(body);
  const json& images = require(j, "images");
  if (!images.is_array()) throw ProtocolError("images", "expected an array");
  GenerateResponse r;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string at = "images[" + std::to_string(i) + "]";
    const json& item = images[i];
    if (!item.is_object()) throw ProtocolError(at, "expected an object");
    const auto idx = item.find("title_index");
    if (idx == item.end() || !idx->is_number_integer() || idx->get<std::int64_t>() < 0)
      throw ProtocolError(at + ".title_index", "expected a non-negative integer");
    const auto png = item.find("png_base64");
    if (png == item.end() || !png->is_string()) throw ProtocolError(at + ".png_base64", "expected a string");
    r.images.push_back({idx->get<int>(), png->get<std::string>()});
  }
  return r;
}

ScoreRequest decode_score_request(std::string_view body) {
  const json j = parse_object(body);
  const json& images = require(j, "images");
  if (!images.is_array()) throw ProtocolError("images", "expected an array");
  ScoreRequest r;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string at = "images[" + std::to_string(i) + "].png_base64";
    if (!images[i].is_object()) throw ProtocolError("images[" + std::to_string(i) + "]", "expected an object");
    const auto png = images[i].find("png_base64");
    if (png == images[i].end() || !png->is_string()) throw ProtocolError(at, "expected a string");
    r.images_png_base64.push_back(png->get<std::string>());
  }
  if (const auto t = j.find("titles"); t != j.end() && !t->is_null()) {
    r.titles = string_array(*t, "titles");
    if (r.titles->size() != r.images_png_base64.size())
      throw ProtocolError("titles", "expected one title per image");
  }
  return r;
}

ScoreReport decode_score_response(std::string_view body) {
  const json j = parse_object(body);
  ScoreReport r;
  r.unconditional = number_array(require(j, "unconditional"), "unconditional");
  if (const auto c = j.find("conditional"); c != j.end() && !c->is_null()) {
    r.conditional = number_array(*c, "conditional");
    if (r.conditional->size() != r.unconditional.size())
      throw ProtocolError("conditional", "length differs from unconditional");
  }
  return r;
}

Health decode_health(std::string_view body) {
  const json j = parse_object(body);
  const json& status = require(j, "status");
  const json& model = require(j, "model");
  if (!status.is_string()) throw ProtocolError("status", "expected a string");
  if (!model.is_string()) throw ProtocolError("model", "expected a string");
  return {status.get<std::string>(), model.get<std::string>()};
}

std::vector<CoverImage> images_in_order(const GenerateResponse& r, std::size_t expected) {
  if (r.images.size() != expected)
    throw ProtocolError("images", "expected " + std::to_string(expected) + " images, got " +
                                      std::to_string(r.images.size()));
  std::vector<CoverImage> out(expected);
  std::vector<bool> filled(expected, false);
  for (std::size_t i = 0; i < r.images.size(); ++i) {
    const auto& item = r.images[i];
    const std::string at = "images[" + std::to_string(i) + "]";
    if (item.title_index < 0 || static_cast<std::size_t>(item.title_index) >= expected ||
        filled[static_cast<std::size_t>(item.title_index)])
      throw ProtocolError(at + ".title_index", "out of range or duplicated");
    try {
      out[static_cast<std::size_t>(item.title_index)] = decode_png(base64_decode(item.png_base64));
    } catch (const DecodeError& e) {
      throw ProtocolError(at + ".png_base64", e.what());
    }
    filled[static_cast<std::size_t>(item.title_index)] = true;
  }
  return out;
}

}  // namespace protocol

}  // namespace covergen
