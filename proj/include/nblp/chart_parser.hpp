#pragma once

#include <string>
#include <vector>

#include "nblp/grammar.hpp"

namespace nblp {

// Bottom-up chart parse with unification at completion. Returns every
// complete analysis rooted at the start category, ordered by derivation
// signature. Empty result = out of coverage.
std::vector<ParseTree> parse_chart(const Grammar& g, const Lexicon& lex,
                                   const std::vector<std::string>& words);

} // namespace nblp
