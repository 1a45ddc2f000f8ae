#include "vowelrec/labels.hpp"

#include "vowelrec/errors.hpp"

namespace vowelrec {

std::string_view vowel_name(Vowel v) {
    switch (v) {
        case Vowel::A: return "A";
        case Vowel::I: return "I";
        case Vowel::U: return "U";
        case Vowel::Ae: return "ae";
        case Vowel::E: return "e";
        case Vowel::O: return "o";
    }
    return "?";
}

std::string_view vowel_display(Vowel v) {
    return v == Vowel::Ae ? "\xc3\xa6" : vowel_name(v);
}

Vowel parse_vowel(std::string_view text) {
    for (Vowel v : all_vowels()) {
        if (text == vowel_name(v) || text == vowel_display(v)) return v;
    }
    throw ManifestError("unknown vowel label: " + std::string(text));
}

const std::vector<std::string>& consonant_inventory() {
    static const std::vector<std::string> inventory = {
        "P", "B", "T", "D", "Ch", "J",  "K", "G", "F", "V", "Kh", "Gh",
        "S", "Z", "Sh", "Zh", "M", "N", "H", "L", "R", "Q", "Y"};
    return inventory;
}

}  // namespace vowelrec
