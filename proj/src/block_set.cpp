#include "mdts/block_set.hpp"

#include <algorithm>

#include "mdts/errors.hpp"
#include "text_util.hpp"

namespace mdts {

BlockSet::BlockSet(std::size_t d, std::size_t m, Alphabet alphabet)
    : d_(d), m_(m), alphabet_(alphabet), prefix_(block_key_prefix(d, m)) {
  if (d == 0 || d > kMaxDim) throw DomainError("block set dimension must be in [1, 3]");
  if (m == 0) throw DomainError("block side m must be positive");
}

BlockSet BlockSet::all(std::size_t d, std::size_t m, Alphabet alphabet) {
  BlockSet s(d, m, alphabet);
  for_each_cube(d, m, alphabet, [&](const NdArray& b) { s.members_.insert(block_key(b)); });
  return s;
}

void BlockSet::insert(const NdArray& block) {
  if (block.alphabet() != alphabet_) throw DomainError("block alphabet does not match block set");
  insert_key(block_key(block));
}

void BlockSet::insert_key(std::string key) {
  std::size_t vol = 1;
  for (std::size_t i = 0; i < d_; ++i) vol *= m_;
  if (key.size() != prefix_.size() + vol || key.compare(0, prefix_.size(), prefix_) != 0) {
    throw DomainError("block key is not an m-cube of this block set");
  }
  for (std::size_t i = prefix_.size(); i < key.size(); ++i) {
    if (static_cast<std::uint8_t>(key[i]) >= alphabet_.size()) {
      throw DomainError("block key symbol outside alphabet");
    }
  }
  members_.insert(std::move(key));
}

bool BlockSet::contains(std::string_view key) const {
  return members_.find(std::string(key)) != members_.end();
}

bool BlockSet::contains(const NdArray& block) const { return contains(block_key(block)); }

std::vector<std::string> BlockSet::sorted_keys() const {
  std::vector<std::string> keys(members_.begin(), members_.end());
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::string BlockSet::serialize() const {
  std::string out = "MDTS-BLOCKSET d=" + std::to_string(d_) + " m=" + std::to_string(m_) +
                    " A=" + std::to_string(alphabet_.size()) + "\n";
  for (const auto& k : sorted_keys()) {
    out += to_hex(k);
    out += '\n';
  }
  return out;
}

BlockSet BlockSet::parse(std::string_view textv) {
  const auto lines = text::split(textv, '\n');
  if (lines.empty() || lines[0].rfind("MDTS-BLOCKSET", 0) != 0) {
    throw FormatError("missing MDTS-BLOCKSET header", 0);
  }
  std::size_t d = 0, m = 0, a = 0;
  for (auto field : text::split(lines[0].substr(13), ' ')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw FormatError("bad block set header field", 0);
    const auto key = field.substr(0, eq);
    const auto value = text::parse_u64(field.substr(eq + 1));
    if (key == "d") d = value;
    else if (key == "m") m = value;
    else if (key == "A") a = value;
    else throw FormatError("unknown block set header field", 0);
  }
  if (d == 0 || m == 0 || a == 0) throw FormatError("incomplete block set header", 0);
  BlockSet set(d, m, Alphabet(static_cast<unsigned>(a)));
  std::size_t offset = lines[0].size() + 1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!lines[i].empty()) {
      try {
        set.insert_key(from_hex(lines[i]));
      } catch (const DomainError& e) {
        throw FormatError(e.what(), offset);
      } catch (const FormatError& e) {
        throw FormatError("bad hex block key", offset + e.offset());
      }
    }
    offset += lines[i].size() + 1;
  }
  return set;
}

}  // namespace mdts
