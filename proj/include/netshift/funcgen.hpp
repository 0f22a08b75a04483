#pragma once

#include <span>
#include <vector>

#include "netshift/circuit.hpp"

namespace netshift {

// Shift-index encoding used by generated circuits. The index l in [1,n] is
// carried either as ceil(lg n) binary inputs holding l-1 (bit 1 = least
// significant) or as n one-hot inputs with a single 1 at position l.
enum class ShiftEncoding { Binary, OneHot };

struct ShiftSpec {
    int n = 0;
    bool cyclic = false;
};

// Plain shift: a 2n-bit string y with y_j = x_{j-l+1} for l <= j <= l+n-1
// and 0 elsewhere. Cyclic: n bits with y_j = x_{((j-l) mod n)+1}. Bits are
// 1-indexed; position 0 of the vectors is x_1/y_1.
std::vector<uint8_t> shift_oracle(const ShiftSpec& spec, std::span<const uint8_t> x, int l);

// Binary product of two n-bit strings, little endian (bit 1 is the least
// significant), 2n output bits.
std::vector<uint8_t> mult_oracle(std::span<const uint8_t> a, std::span<const uint8_t> b);

// Logarithmic-depth shifter over 3-input multiplexers: n data inputs plus
// lg n binary shift inputs (holding l-1), 2n outputs, max in-degree 3 and
// max out-degree 2, Theta(n lg n) gates. n must be a power of two.
Circuit build_barrel_shifter(int n);

// Depth-3 circuit with an empty middle layer computing the identity on n
// bits. Each output reads a window of `window` consecutive inputs (table =
// projection on its own bit), so the max X u Y degree equals the window.
Circuit build_depth3_identity(int n, int window);

struct Depth3ShiftResult {
    Circuit circuit;
    ShiftEncoding encoding;
    int middle_size = 0;
    double eps_achieved = 0.0;  // middle_size / n
    int c_xy = 0;               // max degree in the X u Y induced graph
};

// Depth-3 circuit computing the shift function. The middle layer carries
// lg n selector gates derived from the shift block plus up to
// ceil(eps*n) - lg n promoted copies of leading data bits (promoted bits
// reach outputs through the middle layer instead of direct wires, trading
// middle size against X-Y degree). Output gate fan-in is lg n plus the
// candidate count, capping n at 16 under the arity-24 limit.
Depth3ShiftResult build_depth3_shift(int n, double eps, ShiftEncoding enc = ShiftEncoding::OneHot,
                                     bool cyclic = false);

// Assembles a full input vector for a shift circuit: data bits then the
// shift block encoding l under `enc` (Binary block width ceil(lg n)).
std::vector<uint8_t> shift_input(std::span<const uint8_t> x, int l, ShiftEncoding enc);

}  // namespace netshift
