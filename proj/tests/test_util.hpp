#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "nblp/lexicon.hpp"

namespace nblp::testutil {

// Air-travel vocabulary shared by the regression tests.
inline const char* kLexiconText =
    "list\tlist\tverb\n"
    "list\tlist\tnoun\n"
    "want\twant\tverb\n"
    "go\tgo\tverb\n"
    "serve\tserve\tverb\n"
    "have\thave\tverb\n"
    "could\tcould\tverb\n"
    "fly\tfly\tverb\n"
    "show\tshow\tverb\n"
    "do\tdo\tverb\n"
    "does\tdo\tverb\n"
    "is\tbe\tverb\n"
    "are\tbe\tverb\n"
    "was\tbe\tverb\n"
    "flight\tflight\tnoun\n"
    "breakfast\tbreakfast\tnoun\n"
    "detail\tdetail\tnoun\n"
    "type\ttype\tnoun\n"
    "aircraft\taircraft\tnoun\n"
    "fare\tfare\tnoun\n"
    "trip\ttrip\tnoun\n"
    "air\tair\tnoun\n"
    "stop\tstop\tnoun\n"
    "me\tme\tnoun\n"
    "i\ti\tnoun\n"
    "a\ta\tdet\n"
    "the\tthe\tdet\n"
    "this\tthis\tdet\n"
    "any\tany\tdet\n"
    "no\tno\tdet\n"
    "more\tmore\tdet\n"
    "what\twhat\tdet\n"
    "from\tfrom\tprep\n"
    "to\tto\tprep\n"
    "on\ton\tprep\n"
    "between\tbetween\tprep\n"
    "for\tfor\tprep\n"
    "of\tof\tprep\n"
    "with\twith\tprep\n"
    "in\tin\tprep\n"
    "oakland\toakland\tpn\t*place\n"
    "denver\tdenver\tpn\t*place\n"
    "boston\tboston\tpn\t*place\n"
    "philadelphia\tphiladelphia\tpn\t*place\n"
    "pittsburgh\tpittsburgh\tpn\t*place\n"
    "san\tsan\tpn\t*place\n"
    "francisco\tfrancisco\tpn\t*place\n"
    "tuesday\ttuesday\tpn\t*day\n"
    "delta\tdelta\tpn\t*airline\n"
    "u\tu\tother\n"
    "s\ts\tother\n"
    "d\td\tother\n"
    "l\tl\tother\n"
    "one\tone\tnumber\n"
    "two\ttwo\tnumber\n"
    "three\tthree\tnumber\n"
    "four\tfour\tnumber\n"
    "five\tfive\tnumber\n"
    "six\tsix\tnumber\n"
    "seven\tseven\tnumber\n"
    "eight\teight\tnumber\n"
    "nine\tnine\tnumber\n"
    "ten\tten\tnumber\n"
    "oh\toh\tnumber\n"
    "zero\tzero\tnumber\n"
    "sixteen\tsixteen\tnumber\n"
    "sorry\tsorry\tmarker\n"
    "ok\tok\tother\n"
    "and\tand\tother\n"
    "or\tor\tother\n"
    "nonstop\tnonstop\tother\n"
    "round\tround\tother\n"
    "maybe\tmaybe\tother\n";

inline Lexicon lexicon() { return Lexicon::parse(kLexiconText); }

inline std::vector<std::string> words(const std::string& sentence) {
  return split_words(sentence);
}

inline std::string join(const std::vector<std::string>& ws) {
  std::string out;
  for (size_t i = 0; i < ws.size(); ++i) {
    if (i) out += ' ';
    out += ws[i];
  }
  return out;
}

} // namespace nblp::testutil
