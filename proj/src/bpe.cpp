#include "sciret/bpe.hpp"

#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"

namespace sciret {
namespace {

constexpr std::string_view kMergesHeader = "#version: sciret-bpe 1";

std::string pair_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back('\x1f');
  key.append(right);
  return key;
}

std::vector<std::string_view> split_spaces(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find(' ', start);
    const auto stop = end == std::string_view::npos ? text.size() : end;
    if (stop > start) words.push_back(text.substr(start, stop - start));
    start = stop + 1;
  }
  return words;
}

// Symbol-id based trainer state.
class Trainer {
 public:
  explicit Trainer(const std::vector<std::string>& texts) {
    std::unordered_map<std::string_view, std::size_t> word_ids;
    Fingerprinter fp;
    for (const auto& text : texts) {
      fp.add(text);
      for (auto w : split_spaces(text)) {
        auto [it, inserted] = word_ids.emplace(w, words_.size());
        if (inserted) {
          std::vector<int> seq;
          for (auto& s : initial_symbols(w)) seq.push_back(intern(s));
          words_.push_back(std::move(seq));
          freq_.push_back(0);
        }
        ++freq_[it->second];
      }
    }
    fingerprint_ = fp.value();
    alphabet_size_ = symbols_.size();
    for (std::size_t w = 0; w < words_.size(); ++w) add_pairs(static_cast<int>(w));
    for (const auto& [key, count] : counts_) {
      if (count > 0) heap_.insert(Entry{count, left_of(key), right_of(key)});
    }
  }

  std::size_t alphabet_size() const { return alphabet_size_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  std::vector<MergePair> run(std::size_t vocab_size) {
    std::vector<MergePair> merges;
    while (alphabet_size_ + merges.size() < vocab_size && !heap_.empty()) {
      const Entry best = *heap_.begin();
      if (best.count < 2) break;
      merges.emplace_back(symbols_[best.left], symbols_[best.right]);
      apply(best.left, best.right);
    }
    return merges;
  }

 private:
  struct Entry {
    long long count;
    int left;
    int right;
  };

  struct EntryOrder {
    const std::vector<std::string>* symbols;
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.count != b.count) return a.count > b.count;
      const auto& sa = (*symbols)[a.left];
      const auto& sb = (*symbols)[b.left];
      if (sa != sb) return sa < sb;
      return (*symbols)[a.right] < (*symbols)[b.right];
    }
  };

  static std::uint64_t key_of(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }
  static int left_of(std::uint64_t key) { return static_cast<int>(key >> 32); }
  static int right_of(std::uint64_t key) { return static_cast<int>(key & 0xFFFFFFFFu); }

  int intern(const std::string& s) {
    auto [it, inserted] = symbol_ids_.emplace(s, static_cast<int>(symbols_.size()));
    if (inserted) symbols_.push_back(s);
    return it->second;
  }

  void bump(std::uint64_t key, long long delta) {
    auto& count = counts_[key];
    touched_.try_emplace(key, count);
    count += delta;
  }

  void add_pairs(int w) {
    const auto& seq = words_[w];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      const auto key = key_of(seq[i], seq[i + 1]);
      counts_[key] += freq_[w];
      where_[key].push_back(w);
    }
  }

  void apply(int a, int b) {
    const auto merged_key = key_of(a, b);
    const int merged = intern(symbols_[a] + symbols_[b]);
    std::vector<int> affected = where_[merged_key];
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

    touched_.clear();
    for (int w : affected) {
      auto& seq = words_[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (seq[i] == a && seq[i + 1] == b) {
          present = true;
          break;
        }
      }
      if (!present) continue;

      const long long f = freq_[w];
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) bump(key_of(seq[i], seq[i + 1]), -f);

      std::vector<int> next;
      next.reserve(seq.size());
      for (std::size_t i = 0; i < seq.size();) {
        if (i + 1 < seq.size() && seq[i] == a && seq[i + 1] == b) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(seq[i]);
          ++i;
        }
      }
      seq = std::move(next);

      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        const auto key = key_of(seq[i], seq[i + 1]);
        bump(key, f);
        where_[key].push_back(w);
      }
    }

    for (const auto& [key, old_count] : touched_) {
      if (old_count > 0) heap_.erase(Entry{old_count, left_of(key), right_of(key)});
      const long long now = counts_[key];
      if (now > 0) heap_.insert(Entry{now, left_of(key), right_of(key)});
    }
    where_.erase(merged_key);
  }

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> symbol_ids_;
  std::vector<std::vector<int>> words_;
  std::vector<long long> freq_;
  std::unordered_map<std::uint64_t, long long> counts_;
  std::unordered_map<std::uint64_t, std::vector<int>> where_;
  std::unordered_map<std::uint64_t, long long> touched_;
  std::set<Entry, EntryOrder> heap_{EntryOrder{&symbols_}};
  std::size_t alphabet_size_ = 0;
  std::uint64_t fingerprint_ = 0;
};

}  // namespace

std::vector<std::string> initial_symbols(std::string_view word) {
  std::vector<std::string> symbols;
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(word.data());
  const auto length = static_cast<std::int32_t>(word.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    U8_FWD_1(bytes, i, length);
    symbols.emplace_back(word.substr(static_cast<std::size_t>(start),
                                     static_cast<std::size_t>(i - start)));
  }
  if (!symbols.empty()) symbols.back().append(kEndOfWord);
  return symbols;
}

BpeVocab::BpeVocab(std::vector<MergePair> merges, std::size_t alphabet_size,
                   std::uint64_t trained_on)
    : merges_(std::move(merges)), alphabet_size_(alphabet_size), trained_on_(trained_on) {
  ranks_.reserve(merges_.size());
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    ranks_.try_emplace(pair_key(merges_[i].first, merges_[i].second), static_cast<long>(i));
  }
}

std::uint64_t BpeVocab::fingerprint() const {
  Fingerprinter fp;
  fp.add_u64(alphabet_size_).add_u64(trained_on_).add_u64(merges_.size());
  for (const auto& [l, r] : merges_) fp.add(l).add(r);
  return fp.value();
}

long BpeVocab::rank(std::string_view left, std::string_view right) const {
  const auto it = ranks_.find(pair_key(left, right));
  return it == ranks_.end() ? -1 : it->second;
}

std::vector<std::string> BpeVocab::segment(std::string_view word) const {
  std::vector<std::string> symbols = initial_symbols(word);
  while (symbols.size() > 1) {
    long best = -1;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      const long r = rank(symbols[i], symbols[i + 1]);
      if (r >= 0 && (best < 0 || r < best)) best = r;
    }
    if (best < 0) break;
    const auto& [left, right] = merges_[static_cast<std::size_t>(best)];
    std::vector<std::string> next;
    next.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
        next.push_back(left + right);
        i += 2;
      } else {
        next.push_back(std::move(symbols[i]));
        ++i;
      }
    }
    symbols = std::move(next);
  }
  return symbols;
}

BpeVocab train_bpe(const std::vector<std::string>& texts, std::size_t vocab_size) {
  if (texts.empty()) throw UsageError("train_bpe: no training texts");
  Trainer trainer(texts);
  if (vocab_size <= trainer.alphabet_size()) {
    throw UsageError("train_bpe: vocab_size " + std::to_string(vocab_size) +
                     " must exceed the alphabet size " +
                     std::to_string(trainer.alphabet_size()));
  }
  auto merges = trainer.run(vocab_size);
  return BpeVocab(std::move(merges), trainer.alphabet_size(), trainer.fingerprint());
}

void save_merges(const BpeVocab& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << kMergesHeader << " alphabet=" << vocab.alphabet_size()
      << " trained_on=" << to_hex(vocab.trained_on()) << '\n';
  for (const auto& [l, r] : vocab.merges()) out << l << ' ' << r << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

BpeVocab load_merges(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind(kMergesHeader, 0) != 0) {
    throw DataError(path.string() + ": not a merges file (bad header)");
  }
  std::size_t alphabet = 0;
  std::uint64_t trained_on = 0;
  {
    std::istringstream hdr(line.substr(kMergesHeader.size()));
    std::string field;
    while (hdr >> field) {
      if (field.rfind("alphabet=", 0) == 0) {
        alphabet = std::stoull(field.substr(9));
      } else if (field.rfind("trained_on=", 0) == 0) {
        trained_on = std::stoull(field.substr(11), nullptr, 16);
      }
    }
  }
  std::vector<MergePair> merges;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 == line.size() ||
        line.find(' ', space + 1) != std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed merge");
    }
    merges.emplace_back(line.substr(0, space), line.substr(space + 1));
  }
  return BpeVocab(std::move(merges), alphabet, trained_on);
}

}  // namespace sciret
