#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vowelrec {

// The six Persian vowels, in the fixed order used for one-hot encoding
// and for every report row.
enum class Vowel : int { A = 0, I = 1, U = 2, Ae = 3, E = 4, O = 5 };

inline constexpr std::size_t kVowelCount = 6;

constexpr std::array<Vowel, kVowelCount> all_vowels() {
    return {Vowel::A, Vowel::I, Vowel::U, Vowel::Ae, Vowel::E, Vowel::O};
}

// the same ordering as a label list, for classifier output mapping
inline std::vector<Vowel> vowel_label_order() {
    const auto vs = all_vowels();
    return {vs.begin(), vs.end()};
}

// ASCII name, used in file paths, CSV and JSON.
std::string_view vowel_name(Vowel v);

// Display form for tables ("æ" instead of "ae").
std::string_view vowel_display(Vowel v);

// Accepts both the ASCII and the display form. Throws ManifestError on
// anything else.
Vowel parse_vowel(std::string_view text);

// The 23 Persian consonants, romanized. "Gh" is kept in the default set;
// corpus configs can restrict it away.
const std::vector<std::string>& consonant_inventory();

}  // namespace vowelrec
