#pragma once

// Little-endian stream helpers shared by the binary artifact formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "credigraph/errors.hpp"

namespace credigraph::io {

static_assert(std::endian::native == std::endian::little,
              "artifact formats are little-endian; add byte swapping for this target");

template <class T>
void write_le(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
bool try_read_le(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return in.gcount() == static_cast<std::streamsize>(sizeof(T));
}

template <class T>
T read_le(std::istream& in, std::string_view what) {
    T value{};
    if (!try_read_le(in, value)) {
        throw FormatError("truncated " + std::string(what));
    }
    return value;
}

// Eight-byte magic, NUL padded.
using Magic = std::array<char, 8>;

constexpr Magic make_magic(std::string_view tag) {
    Magic m{};
    for (std::size_t i = 0; i < tag.size() && i < m.size(); ++i) {
        m[i] = tag[i];
    }
    return m;
}

inline void write_magic(std::ostream& out, const Magic& magic) {
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

inline void expect_magic(std::istream& in, const Magic& magic, std::string_view file) {
    Magic got{};
    in.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (in.gcount() != static_cast<std::streamsize>(got.size()) || got != magic) {
        throw FormatError("`" + std::string(file) + "` is not a " +
                          std::string(magic.data(), strnlen(magic.data(), magic.size())) +
                          " file (bad or missing version header)");
    }
}

// u32-length-prefixed byte string.
inline void write_string(std::ostream& out, std::string_view s) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline bool try_read_string(std::istream& in, std::string& s) {
    std::uint32_t len = 0;
    if (!try_read_le(in, len)) {
        return false;
    }
    s.resize(len);
    in.read(s.data(), len);
    if (in.gcount() != static_cast<std::streamsize>(len)) {
        throw FormatError("truncated string field");
    }
    return true;
}

inline std::string read_string(std::istream& in) {
    std::string s;
    if (!try_read_string(in, s)) {
        throw FormatError("truncated string length");
    }
    return s;
}

}  // namespace credigraph::io
