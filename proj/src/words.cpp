#include "nevan/words.hpp"

#include <algorithm>
#include <set>

#include "nevan/errors.hpp"

namespace nevan {

Word::Word(std::vector<int> letters) : letters_(std::move(letters)) {
  for (int l : letters_)
    if (l < 1) throw PreconditionError("word letters start at 1");
  std::sort(letters_.begin(), letters_.end());
}

Word Word::parse(std::string_view text) {
  if (text.empty() || text == "e") return Word();
  std::vector<int> letters;
  for (char c : text) {
    if (c < '1' || c > '9') throw ConfigError("word '" + std::string(text) + "' must consist of digits 1-9");
    letters.push_back(c - '0');
  }
  return Word(std::move(letters));
}

std::vector<unsigned> Word::multi_index(std::size_t p) const {
  std::vector<unsigned> alpha(p, 0);
  for (int l : letters_) {
    if (static_cast<std::size_t>(l) > p) throw PreconditionError("word letter exceeds the alphabet size");
    ++alpha[static_cast<std::size_t>(l - 1)];
  }
  return alpha;
}

std::string Word::to_string() const {
  if (letters_.empty()) return "e";
  std::string s;
  for (int l : letters_) s += std::to_string(l);
  return s;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.order() <=> b.order(); c != 0) return c;
  return a.letters_ <=> b.letters_;
}

std::vector<Word> subwords(const Word& w) {
  // Sub-multisets: choose a count 0..c_k for each distinct letter.
  std::vector<std::pair<int, int>> runs;
  for (int l : w.letters()) {
    if (!runs.empty() && runs.back().first == l) ++runs.back().second;
    else runs.emplace_back(l, 1);
  }
  std::vector<Word> out;
  std::vector<int> counts(runs.size(), 0);
  for (;;) {
    std::vector<int> letters;
    for (std::size_t k = 0; k < runs.size(); ++k) letters.insert(letters.end(), counts[k], runs[k].first);
    out.emplace_back(std::move(letters));
    std::size_t k = 0;
    while (k < runs.size() && counts[k] == runs[k].second) counts[k++] = 0;
    if (k == runs.size()) break;
    ++counts[k];
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_full_set(const std::vector<Word>& words) {
  std::set<Word> s(words.begin(), words.end());
  // Closure under single-letter deletion implies closure under all subwords.
  for (const Word& w : s) {
    const auto& l = w.letters();
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (k > 0 && l[k] == l[k - 1]) continue;
      std::vector<int> shorter = l;
      shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(k));
      if (!s.count(Word(std::move(shorter)))) return false;
    }
  }
  return true;
}

bool is_admissible(const std::vector<Word>& words, std::size_t n) {
  if (words.size() != n + 1)
    throw PreconditionError("admissibility needs exactly n+1 = " + std::to_string(n + 1) + " words, got " +
                            std::to_string(words.size()));
  std::vector<std::size_t> orders;
  for (const auto& w : words) orders.push_back(w.order());
  std::sort(orders.begin(), orders.end());
  for (std::size_t s = 0; s < orders.size(); ++s)
    if (orders[s] > s) return false;
  return true;
}

OperatorSet::OperatorSet(std::size_t p, std::vector<Word> words) : p_(p), words_(std::move(words)) {
  if (p_ == 0) throw PreconditionError("alphabet size must be positive");
  if (words_.empty()) throw PreconditionError("an operator set needs at least the identity");
  std::sort(words_.begin(), words_.end());
  if (std::adjacent_find(words_.begin(), words_.end()) != words_.end())
    throw PreconditionError("operator set contains a repeated word");
  if (!words_.front().empty()) throw PreconditionError("operator set must contain the identity");
  for (const auto& w : words_)
    if (static_cast<std::size_t>(w.max_letter()) > p_)
      throw PreconditionError("word " + w.to_string() + " uses a letter beyond p = " + std::to_string(p_));
}

std::size_t OperatorSet::first_order_count() const {
  return static_cast<std::size_t>(std::count_if(words_.begin(), words_.end(), [](const Word& w) { return w.order() == 1; }));
}

std::string OperatorSet::to_string() const {
  std::string s = "{";
  for (std::size_t k = 0; k < words_.size(); ++k) {
    if (k) s += ",";
    s += words_[k].to_string();
  }
  return s + "}";
}

std::vector<OperatorSet> enumerate_admissible_full_sets(std::size_t p, std::size_t n, std::optional<std::size_t> max_order,
                                                        const EnumerationBudget& budget) {
  if (p < 1) throw PreconditionError("p must be at least 1");
  if (p > budget.max_p || n > budget.max_n)
    throw BudgetExceeded("enumeration of full sets for p=" + std::to_string(p) + ", n=" + std::to_string(n) +
                         " exceeds the budget p<=" + std::to_string(budget.max_p) +
                         ", n<=" + std::to_string(budget.max_n));

  // Grow order ideals one word at a time; a word may join once all of its
  // one-letter deletions are present. A set of sorted sets dedups the search.
  std::set<std::vector<Word>> frontier{{Word()}};
  for (std::size_t size = 1; size < n + 1; ++size) {
    std::set<std::vector<Word>> next;
    for (const auto& current : frontier) {
      std::set<Word> have(current.begin(), current.end());
      std::set<Word> candidates;
      for (const Word& w : current) {
        for (int letter = 1; letter <= static_cast<int>(p); ++letter) {
          std::vector<int> l = w.letters();
          l.push_back(letter);
          Word c(std::move(l));
          if (have.count(c)) continue;
          if (max_order && c.order() > *max_order) continue;
          candidates.insert(std::move(c));
        }
      }
      for (const Word& c : candidates) {
        bool closed = true;
        const auto& l = c.letters();
        for (std::size_t k = 0; k < l.size() && closed; ++k) {
          std::vector<int> shorter = l;
          shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(k));
          closed = have.count(Word(std::move(shorter))) > 0;
        }
        if (!closed) continue;
        std::vector<Word> grown = current;
        grown.push_back(c);
        std::sort(grown.begin(), grown.end());
        next.insert(std::move(grown));
      }
    }
    frontier = std::move(next);
  }

  std::vector<OperatorSet> out;
  for (const auto& words : frontier) {
    OperatorSet s(p, words);
    if (s.admissible()) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nevan
