#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nevan {

/// A commuting partial-derivative operator, stored as the sorted multiset of the
/// variables it differentiates in (letters 1..p). The empty word is the identity.
class Word {
 public:
  Word() = default;
  /// Sorts the letters; throws PreconditionError on a letter < 1.
  explicit Word(std::vector<int> letters);
  /// "" or "e" for the identity, otherwise digits such as "112".
  static Word parse(std::string_view text);

  const std::vector<int>& letters() const { return letters_; }
  std::size_t order() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  /// Multi-index alpha with alpha[k] = number of times letter k+1 occurs.
  std::vector<unsigned> multi_index(std::size_t p) const;
  int max_letter() const { return letters_.empty() ? 0 : letters_.back(); }

  /// "e" for the empty word, else the letters concatenated.
  std::string to_string() const;

  /// Canonical order: by order, then lexicographically by letters.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);
  friend bool operator==(const Word& a, const Word& b) = default;

 private:
  std::vector<int> letters_;
};

/// All distinct sub-multisets of w, canonical order, including the empty word and w.
std::vector<Word> subwords(const Word& w);

/// Closed under taking subwords.
bool is_full_set(const std::vector<Word>& words);

/// Orders sorted o_0 <= ... <= o_n satisfy o_s <= s. Throws PreconditionError when
/// words.size() != n + 1.
bool is_admissible(const std::vector<Word>& words, std::size_t n);

/// An admissible family S of n+1 distinct operators over the alphabet {1..p},
/// held in canonical order (the row order used by generalized Wronskians).
class OperatorSet {
 public:
  /// Validates distinctness, letter range, cardinality n+1 and the identity.
  OperatorSet(std::size_t p, std::vector<Word> words);

  std::size_t p() const { return p_; }
  std::size_t n() const { return words_.size() - 1; }
  const std::vector<Word>& words() const { return words_; }
  std::size_t max_order() const { return words_.back().order(); }
  bool full() const { return is_full_set(words_); }
  bool admissible() const { return is_admissible(words_, n()); }
  /// Number of order-1 words.
  std::size_t first_order_count() const;

  std::string to_string() const;

  friend auto operator<=>(const OperatorSet& a, const OperatorSet& b) { return a.words_ <=> b.words_; }
  friend bool operator==(const OperatorSet& a, const OperatorSet& b) = default;

 private:
  std::size_t p_;
  std::vector<Word> words_;
};

struct EnumerationBudget {
  std::size_t max_p = 4;
  std::size_t max_n = 8;
};

/// Every admissible full set of n+1 words over {1..p}, optionally restricted to
/// words of order <= max_order, sorted canonically. Throws BudgetExceeded when
/// (p, n) is outside the budget.
std::vector<OperatorSet> enumerate_admissible_full_sets(std::size_t p, std::size_t n,
                                                        std::optional<std::size_t> max_order = std::nullopt,
                                                        const EnumerationBudget& budget = {});

}  // namespace nevan
