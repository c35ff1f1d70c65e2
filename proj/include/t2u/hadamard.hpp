#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "t2u/errors.hpp"
#include "t2u/radio.hpp"
#include "t2u/ris.hpp"

namespace t2u {

// Smallest power of two that can host one distinct balanced row per VUE, i.e.
// the smallest power of two >= k + 1 (the all-ones row is reserved).
inline int code_length_for(int vue_count) {
    if (vue_count < 1) throw ConfigError("vue count must be >= 1");
    if (vue_count > (1 << 24)) throw ConfigError("vue count too large for code construction");
    return static_cast<int>(std::bit_ceil(static_cast<unsigned>(vue_count) + 1u));
}

// Sylvester-type binary codebook of length c (power of two). Row r, chip j
// carries bit (1 + sign)/2 where sign = (-1)^{popcount(r & j)}. Row 0 is the
// all-ones word and is never assigned; rows 1..c-1 are balanced (c/2 ones) and
// pairwise at Hamming distance c/2. VUE k holds row k+1.
struct HadamardCodebook {
    int length = 0;
    std::vector<std::uint8_t> bits;  // row-major, length x length

    static HadamardCodebook with_length(int c) {
        if (c < 2 || (c & (c - 1)) != 0) throw ConfigError("code length must be a power of two >= 2");
        HadamardCodebook cb;
        cb.length = c;
        cb.bits.resize(static_cast<std::size_t>(c) * c);
        for (int r = 0; r < c; ++r)
            for (int j = 0; j < c; ++j)
                cb.bits[static_cast<std::size_t>(r) * c + j] =
                    (std::popcount(static_cast<unsigned>(r & j)) & 1) ? 0 : 1;
        return cb;
    }

    static HadamardCodebook for_vue_count(int k) {
        return with_length(code_length_for(k));
    }

    const std::uint8_t* row(int r) const {
        if (r < 0 || r >= length) throw StructureError("codebook row index out of range");
        return bits.data() + static_cast<std::size_t>(r) * length;
    }

    // Row assigned to VUE k. Row 0 stays reserved.
    int row_for_vue(int k) const {
        if (k < 0 || k + 1 >= length)
            throw StructureError("no codebook row available for this VUE index");
        return k + 1;
    }

    int usable_rows() const { return length - 1; }
};

// Correlation of a received hard-bit word against a codebook row under the
// bipolar map b -> 2b - 1. Integer-exact; equals c - 2 * (Hamming distance).
inline int correlate_bipolar(const std::uint8_t* received, const std::uint8_t* code, int c) {
    int acc = 0;
    for (int j = 0; j < c; ++j)
        acc += (2 * static_cast<int>(received[j]) - 1) * (2 * static_cast<int>(code[j]) - 1);
    return acc;
}

// On-off keying timeline of one code word: each bit occupies one coherent
// processing interval of repetition_factor pulses.
struct CodeTiming {
    double pulse_time_s = 0.0;
    double bit_time_s = 0.0;
    double code_duration_s = 0.0;

    static CodeTiming from(const RadioParams& radio, int code_length) {
        if (code_length < 1) throw ConfigError("code length must be >= 1");
        CodeTiming t;
        t.pulse_time_s = radio.pulse_time_s;
        t.bit_time_s = radio.bit_time_s();
        t.code_duration_s = t.bit_time_s * code_length;
        return t;
    }
};

// Per-bit RIS profile sequence realizing a codeword for a VUE whose surface
// sees the BS under (theta, psi). On-bits back-reflect; off-bits use the
// requested idle behaviour (random-scatter phases drawn fresh per off-bit).
inline std::vector<RisProfile> reflection_schedule(const std::uint8_t* codeword, int code_length,
                                                   int ris_elements, double theta_rad,
                                                   double psi_rad, RisMode idle_variant,
                                                   double leakage_power_ratio, Rng& rng) {
    std::vector<RisProfile> seq;
    seq.reserve(static_cast<std::size_t>(code_length));
    const RisProfile on = back_reflection_profile(ris_elements, theta_rad, psi_rad);
    for (int b = 0; b < code_length; ++b) {
        if (codeword[b])
            seq.push_back(on);
        else
            seq.push_back(idle_profile(ris_elements, idle_variant, leakage_power_ratio, rng));
    }
    return seq;
}

} // namespace t2u
