// fmm: text formats — the coefficient file format and the program grammar.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fmm/scheme.hpp"
#include "fmm/slp.hpp"

namespace fmm {

/// Reads the three-block coefficient format: whitespace-separated integer
/// rows, blocks separated by lines whose first non-blank character is '#'.
/// Blocks become U, V, W; the shared column count is the rank. Dims are
/// inferred from the block row counts when they factor uniquely as
/// (n*m, m*p, n*p), otherwise explicit dims are required.
BilinearScheme parse_scheme(const std::string& text, std::optional<Dims> dims = std::nullopt,
                            std::string name = "");

/// Inverse of parse_scheme, integers only. Single-space columns, one '#'
/// line between blocks, no trailing newline.
std::string serialize_scheme(const BilinearScheme& scheme);

/// Lines rendered with a negative leading term because no positive term
/// was available; each implies one extra negation at execution time.
struct EmitStats {
    std::vector<std::string> negative_leading;
};

/// Parses the program grammar
///   name = term ((+|-) term)*            linear combination
///   name = factor * factor               product, factor = (expr) | term
///   term = [sign] [integer | p/q] name
/// with names A<i>, B<i>, t<i>, u<i>, v<i>, M<i>, C<i> (an optional
/// underscore before the index is accepted). Multi-term combinations fold
/// into left-to-right chains after rotating each term list to a positive
/// leading coefficient. Dims are inferred from the A/B/C index ranges
/// unless given explicitly.
Slp parse_slp(const std::string& text, std::optional<Dims> dims = std::nullopt);

/// Renders a program in the grammar above, one line per combination,
/// rotating every term list so a positive term leads whenever one exists.
std::string emit_slp(const Slp& slp, EmitStats* stats = nullptr);

}  // namespace fmm
