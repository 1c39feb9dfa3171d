// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_TESTS_BLEU_FIXTURE_HPP_
#define STREAMSIM_TESTS_BLEU_FIXTURE_HPP_

#include <string>
#include <vector>

namespace test_fixture {

inline const std::vector<std::string> kBleuHyps = {
    "The cat sat on the mat.",
    "A quick brown fox jumps over the lazy dog",
    "It costs $3.50, not 4,000 dollars!",
    "Hello, world!",
    "we meet at 10:30 tomorrow",
    "the results were good",
    "He said: \"no way\".",
    "state-of-the-art systems are fast",
    "1990-2000 was a decade",
    "I don't know what you mean",
    "x",
    "the the the the",
    "Speech translation in real time is hard.",
    "AT&amp;T and &lt;tags&gt;",
    "prices rose by 5% in 2023.",
    "Wait... what?",
    "she reads books (mostly novels)",
    "one two three four five six seven",
    "\xC3\x9C" "ber na\xC3\xAF" "ve caf\xC3\xA9",
    "end of the corpus",
};

inline const std::vector<std::string> kBleuRefs = {
    "The cat sat on the mat.",
    "The quick brown fox jumped over the lazy dog.",
    "It costs $3.50 and not 4,000 dollars.",
    "Hello world!",
    "We will meet tomorrow at 10:30.",
    "The results were very good indeed.",
    "He said \"no way\".",
    "State-of-the-art systems are fast.",
    "The decade 1990-2000.",
    "I do not know what you mean.",
    "completely different sentence here",
    "the cat is on the mat",
    "Real-time speech translation is hard.",
    "AT&T and <tags>",
    "Prices rose 5% in 2023.",
    "Wait, what?",
    "She reads books, mostly novels.",
    "one two three four five six seven eight",
    "Uber naive cafe",
    "This is the end of the corpus.",
};

}  // namespace test_fixture

#endif  // STREAMSIM_TESTS_BLEU_FIXTURE_HPP_
