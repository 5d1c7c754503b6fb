// PLGF grid-function files: "PLGF", version byte, p, k, n as u32 little
// endian, value-kind byte, then the dense value array. Rationals are stored
// as (numerator, denominator) int64 pairs, floats as IEEE-754 binary64 and
// complex values as (real, imaginary) pairs.

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "popdiff/gridfn.hpp"

namespace popdiff {

namespace {

constexpr char kMagic[4] = {'P', 'L', 'G', 'F'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 1 + 3 * 4 + 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_i64(std::string& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const std::string& s, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
  }
  return v;
}

std::int64_t to_i64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw FormatError("rational component does not fit in 64 bits");
  }
  return v.convert_to<std::int64_t>();
}

std::size_t value_width(ValueKind kind) {
  return kind == ValueKind::Float ? 8 : 16;
}

}  // namespace

std::string encode_gridfn(const GridFunction& f) {
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  put_u32(out, f.shape().p());
  put_u32(out, static_cast<std::uint32_t>(f.shape().k()));
  put_u32(out, static_cast<std::uint32_t>(f.shape().n()));
  out.push_back(static_cast<char>(f.kind()));
  out.reserve(kHeaderSize + f.size() * value_width(f.kind()));
  switch (f.kind()) {
    case ValueKind::ExactRational:
      for (const auto& v : f.rationals()) {
        put_i64(out, to_i64(boost::multiprecision::numerator(v)));
        put_i64(out, to_i64(boost::multiprecision::denominator(v)));
      }
      break;
    case ValueKind::Float:
      for (double v : f.reals()) put_f64(out, v);
      break;
    case ValueKind::ComplexFloat:
      for (const auto& v : f.complexes()) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
      }
      break;
  }
  return out;
}

GridFunction decode_gridfn(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw BadMagic("not a PLGF grid-function file");
  }
  if (bytes.size() < kHeaderSize) throw CorruptLength("truncated PLGF header");
  if (static_cast<std::uint8_t>(bytes[4]) != kVersion) {
    throw VersionMismatch("unsupported PLGF version " +
                          std::to_string(static_cast<unsigned>(
                              static_cast<std::uint8_t>(bytes[4]))));
  }
  const auto p = static_cast<std::uint32_t>(get_u64(bytes, 5, 4));
  const auto k = static_cast<std::size_t>(get_u64(bytes, 9, 4));
  const auto n = static_cast<std::size_t>(get_u64(bytes, 13, 4));
  const auto raw_kind = static_cast<std::uint8_t>(bytes[17]);
  if (raw_kind > 2) throw FormatError("unknown PLGF value kind");
  const auto kind = static_cast<ValueKind>(raw_kind);
  const GridShape shape(p, k, n);
  const std::size_t width = value_width(kind);
  if (bytes.size() != kHeaderSize + shape.size() * width) {
    throw CorruptLength("PLGF payload has " +
                        std::to_string(bytes.size() - kHeaderSize) +
                        " bytes, expected " + std::to_string(shape.size() * width));
  }
  std::size_t pos = kHeaderSize;
  auto next_u64 = [&] {
    const std::uint64_t v = get_u64(bytes, pos, 8);
    pos += 8;
    return v;
  };
  switch (kind) {
    case ValueKind::ExactRational: {
      std::vector<Rational> v(shape.size());
      for (auto& x : v) {
        const auto num = static_cast<std::int64_t>(next_u64());
        const auto den = static_cast<std::int64_t>(next_u64());
        if (den <= 0) throw FormatError("nonpositive denominator in PLGF file");
        x = make_rational(num, den);
      }
      return GridFunction(shape, std::move(v));
    }
    case ValueKind::Float: {
      std::vector<double> v(shape.size());
      for (auto& x : v) x = std::bit_cast<double>(next_u64());
      return GridFunction(shape, std::move(v));
    }
    case ValueKind::ComplexFloat: {
      std::vector<Complex> v(shape.size());
      for (auto& x : v) {
        const double re = std::bit_cast<double>(next_u64());
        const double im = std::bit_cast<double>(next_u64());
        x = {re, im};
      }
      return GridFunction(shape, std::move(v));
    }
  }
  throw FormatError("unknown PLGF value kind");
}

void write_gridfn(const std::string& path, const GridFunction& f) {
  const std::string bytes = encode_gridfn(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

GridFunction read_gridfn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_gridfn(bytes);
}

}  // namespace popdiff
