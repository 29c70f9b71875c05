#pragma once

// Header parsing and little-endian helpers shared by the binary file codecs.

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <string_view>

#include "echoq/error.hpp"

namespace echoq::detail {

constexpr long long kMaxPixels = 1LL << 28;

inline void check_dimensions(long long w, long long h)
{
    if (w <= 0 || h <= 0) throw InputError("malformed header: non-positive dimensions");
    if (w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max() ||
        w * h > kMaxPixels)
        throw InputError("dimension overflow");
}

// Minimal cursor over a binary buffer for header parsing.
class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    bool at_end() const { return pos_ >= bytes_.size(); }
    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    char peek() const
    {
        if (at_end()) throw InputError("unexpected end of data");
        return bytes_[pos_];
    }
    char get()
    {
        char c = peek();
        ++pos_;
        return c;
    }
    void expect(std::string_view literal)
    {
        if (bytes_.substr(pos_, literal.size()) != literal) {
            if (remaining() < literal.size()) throw InputError("unexpected end of data");
            throw InputError("malformed header: bad magic");
        }
        pos_ += literal.size();
    }
    void skip_blanks()
    {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n'))
            ++pos_;
    }
    std::string_view token()
    {
        skip_blanks();
        std::size_t start = pos_;
        while (!at_end()) {
            char c = bytes_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') break;
            ++pos_;
        }
        if (start == pos_) throw InputError("unexpected end of data");
        return bytes_.substr(start, pos_ - start);
    }
    std::string_view take(std::size_t n)
    {
        if (remaining() < n) throw InputError("unexpected end of data");
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

inline long long parse_int(std::string_view tok)
{
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec == std::errc::result_out_of_range) throw InputError("dimension overflow");
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw InputError("malformed header: expected integer, got '" + std::string(tok) + "'");
    return v;
}

inline double parse_double(std::string_view tok)
{
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw InputError("malformed header: expected number, got '" + std::string(tok) + "'");
    return v;
}

inline std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw InvariantError("cannot format number");
    return std::string(buf, ptr);
}

inline void single_whitespace(Reader& in)
{
    char c = in.get();
    if (c != ' ' && c != '\n' && c != '\t' && c != '\r')
        throw InputError("malformed header: missing separator before data");
}

inline float load_le_float(const char* p)
{
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

inline void store_le_float(char* p, float f)
{
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
    std::memcpy(p, &u, 4);
}

} // namespace echoq::detail
