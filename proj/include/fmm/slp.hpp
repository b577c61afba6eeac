// fmm: straight-line programs in SSA form, their kind system and counting.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fmm/scheme.hpp"

namespace fmm {

using ValueId = std::int32_t;

/// Every value is a linear form in A-entries, in B-entries, or a linear
/// combination of bilinear products. Lin operands must share a kind;
/// Mul takes (A, B) and defines an M value.
enum class Kind : std::uint8_t { A, B, M };

/// Branch-free program computing C = A*B through R products. Values are
/// numbered 0..num_values()-1; ids 0..nm-1 are the A-entries, nm..nm+mp-1
/// the B-entries, and each instruction defines the next id (SSA by
/// construction). Values with an empty name are chain-internal accumulators:
/// they are used exactly once, by the immediately consuming instruction of
/// the same rendered line.
class Slp {
public:
    struct Lin {  // dst := c1*src1 + c2*src2, both coefficients nonzero
        ValueId dst, src1, src2;
        Rational c1, c2;
        bool operator==(const Lin&) const = default;
    };
    struct Scale {  // dst := c*src, c not in {0, 1}
        ValueId dst, src;
        Rational c;
        bool operator==(const Scale&) const = default;
    };
    struct Mul {  // dst := a * b, a A-linear, b B-linear
        ValueId dst, a, b;
        bool operator==(const Mul&) const = default;
    };
    using Instr = std::variant<Lin, Scale, Mul>;

    Dims dims;
    std::vector<Instr> instrs;
    std::vector<Kind> kinds;         // per value
    std::vector<std::string> names;  // per value; "" = anonymous accumulator
    std::vector<ValueId> outputs;    // outputs[c] = value computing C_c

    int num_inputs_a() const { return dims.n * dims.m; }
    int num_inputs_b() const { return dims.m * dims.p; }
    ValueId a_input(int i) const { return ValueId(i); }
    ValueId b_input(int i) const { return ValueId(num_inputs_a() + i); }
    size_t num_values() const { return kinds.size(); }

    int mul_count() const;

    bool operator==(const Slp&) const = default;
};

/// Checks the SSA discipline, kind consistency, coefficient restrictions,
/// output table completeness and the single-use rule for anonymous values.
/// Throws SsaError / KindError / ArgError with a description on violation.
void validate(const Slp& slp);

/// One addition per Lin, classified by the kind of its destination;
/// Scale instructions land in the scales tally.
OpCountReport slp_addition_count(const Slp& slp);

/// Literal schedule of a scheme: every linear form accumulated
/// left-to-right in index order, products in column order.
Slp scheme_to_naive_slp(const BilinearScheme& scheme);

// ---------------------------------------------------------------------
// Line view: the rendered-line structure underlying a program. parse,
// emit and the negation rebalancer all speak this shape. Terms reference
// values by name, so lines survive a rebuild that renumbers ids.

struct Term {
    Rational coef;
    ValueId value;
    bool operator==(const Term&) const = default;
};

struct LineTerm {
    Rational coef;
    std::string name;
    bool operator==(const LineTerm&) const = default;
};

struct SlpLine {
    enum class Op { Linear, Product, Scaled, Alias } op;
    std::string dst_name;
    std::vector<LineTerm> terms;    // Linear (>= 2), Scaled / Alias (exactly 1)
    std::vector<LineTerm> a_terms;  // Product only
    std::vector<LineTerm> b_terms;  // Product only
    bool operator==(const SlpLine&) const = default;
};

/// Recovers the line structure (inverse of build_slp_from_lines).
/// Output aliases are appended for outputs whose value is not named C<c>.
std::vector<SlpLine> decompose_lines(const Slp& slp);

/// Assembles a program from lines, folding combinations left-to-right in
/// the given term order. Lines named C<c> (and aliases) define outputs.
Slp build_slp_from_lines(Dims dims, const std::vector<SlpLine>& lines);

/// Cyclically rotates terms so the first coefficient is positive, keeping
/// the stable source order. Returns false (and leaves the terms alone)
/// when no positive term exists.
bool rotate_leading_positive(std::vector<LineTerm>& terms);

/// Incremental Slp assembly; folds multi-term combinations into
/// left-to-right chains of anonymous accumulators.
class SlpBuilder {
public:
    explicit SlpBuilder(Dims dims);

    ValueId a_input(int i) const { return slp_.a_input(i); }
    ValueId b_input(int i) const { return slp_.b_input(i); }

    /// Folds coef*value terms into a chain; a single unit-coefficient term
    /// returns the value itself, a single non-unit term becomes a Scale.
    /// All terms must share a kind. dst_name may be empty for an anonymous
    /// result (embedded product operands).
    ValueId fold_terms(const std::vector<Term>& terms, const std::string& dst_name);

    ValueId add_mul(ValueId a, ValueId b, const std::string& dst_name);

    /// Declares C_c to be the given value.
    void set_output(int c, ValueId v);

    ValueId find(const std::string& name) const;  // -1 when absent

    Kind kind_of(ValueId v) const { return slp_.kinds[size_t(v)]; }
    const std::string& name_of(ValueId v) const { return slp_.names[size_t(v)]; }

    /// Validates and returns the program. The builder is spent afterwards.
    Slp finish();

private:
    ValueId new_value(Kind k, const std::string& name);
    Slp slp_;
};

}  // namespace fmm
