#pragma once

// Penn Treebank tagset: the 36 word-level tags plus the punctuation tags.
// This is the reference table served to the exploration UI; every tag any
// tagger emits must appear here.

#include <algorithm>
#include <array>
#include <string_view>

namespace textdiv {

struct TagInfo {
  std::string_view tag;
  std::string_view description;
  std::string_view example;
};

inline constexpr std::array<TagInfo, 45> kPennTagset{{
    {"CC", "Coordinating conjunction", "and, or, but"},
    {"CD", "Cardinal number", "three, 42"},
    {"DT", "Determiner", "the, a, these"},
    {"EX", "Existential there", "there is"},
    {"FW", "Foreign word", "et cetera"},
    {"IN", "Preposition or subordinating conjunction", "of, in, because"},
    {"JJ", "Adjective", "green, cute"},
    {"JJR", "Adjective, comparative", "greener"},
    {"JJS", "Adjective, superlative", "greenest"},
    {"LS", "List item marker", "1), a."},
    {"MD", "Modal", "can, should"},
    {"NN", "Noun, singular or mass", "dog, water"},
    {"NNS", "Noun, plural", "dogs"},
    {"NNP", "Proper noun, singular", "London"},
    {"NNPS", "Proper noun, plural", "Americans"},
    {"PDT", "Predeterminer", "all the, both the"},
    {"POS", "Possessive ending", "'s"},
    {"PRP", "Personal pronoun", "I, they"},
    {"PRP$", "Possessive pronoun", "my, their"},
    {"RB", "Adverb", "quickly, not"},
    {"RBR", "Adverb, comparative", "faster"},
    {"RBS", "Adverb, superlative", "fastest"},
    {"RP", "Particle", "give up"},
    {"SYM", "Symbol", "%, &, +"},
    {"TO", "to", "to go"},
    {"UH", "Interjection", "oh, wow"},
    {"VB", "Verb, base form", "take"},
    {"VBD", "Verb, past tense", "took"},
    {"VBG", "Verb, gerund or present participle", "taking"},
    {"VBN", "Verb, past participle", "taken"},
    {"VBP", "Verb, non-3rd person singular present", "take"},
    {"VBZ", "Verb, 3rd person singular present", "takes"},
    {"WDT", "Wh-determiner", "which"},
    {"WP", "Wh-pronoun", "who, what"},
    {"WP$", "Possessive wh-pronoun", "whose"},
    {"WRB", "Wh-adverb", "where, when"},
    {"#", "Pound sign", "#"},
    {"$", "Dollar sign", "$"},
    {"''", "Closing quotation mark", "' \""},
    {"``", "Opening quotation mark", "` \""},
    {"(", "Opening bracket", "( [ {"},
    {")", "Closing bracket", ") ] }"},
    {",", "Comma", ","},
    {".", "Sentence-final punctuation", ". ! ?"},
    {":", "Colon, semicolon, dash, ellipsis", ": ; -"},
}};

inline bool is_known_tag(std::string_view tag) {
  return std::any_of(kPennTagset.begin(), kPennTagset.end(),
                     [&](const TagInfo& info) { return info.tag == tag; });
}

}  // namespace textdiv
