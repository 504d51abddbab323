#pragma once

#include <numeric>
#include <stdexcept>
#include <string>

namespace scmapolar {

/// LLR magnitudes are clipped to this bound before decoding so that
/// certainty posteriors never produce non-finite arithmetic.
inline constexpr double kLlrSaturation = 40.0;

/// Raised for bad configuration files, missing inputs and CLI misuse.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scheme { bipcm, mlpc };
enum class DecoderKind { sc, scl };
enum class InterleaverMode { per_frame, fixed, identity };

/// Exact code rate.  Kept rational so payload sizes like floor(2/3 * 2048)
/// come out exact instead of trusting floating point.
struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    /// Accepts "2/3", "1/2", or a plain decimal like "0.5".
    static Rational parse(const std::string& text);
};

inline Rational Rational::parse(const std::string& text) {
    auto fail = [&] { throw ConfigError("bad rate: '" + text + "'"); };
    if (text.empty()) fail();
    Rational r;
    auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            r.num = std::stoll(text.substr(0, slash));
            r.den = std::stoll(text.substr(slash + 1));
        } else {
            auto dot = text.find('.');
            if (dot == std::string::npos) {
                r.num = std::stoll(text);
                r.den = 1;
            } else {
                std::string digits = text.substr(0, dot) + text.substr(dot + 1);
                r.num = std::stoll(digits);
                r.den = 1;
                for (std::size_t i = 0; i < text.size() - dot - 1; ++i) r.den *= 10;
            }
        }
    } catch (const std::exception&) {
        fail();
    }
    if (r.den <= 0 || r.num < 0) fail();
    long long g = std::gcd(r.num, r.den);
    if (g > 1) { r.num /= g; r.den /= g; }
    return r;
}

inline const char* to_string(Scheme s) { return s == Scheme::bipcm ? "bipcm" : "mlpc"; }
inline const char* to_string(DecoderKind d) { return d == DecoderKind::sc ? "sc" : "scl"; }

}  // namespace scmapolar
