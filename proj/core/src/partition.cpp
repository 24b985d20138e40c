#include "sentiflow/partition.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "sentiflow/csv.hpp"
#include "sentiflow/normalize.hpp"

namespace sentiflow {
namespace {

struct DigestHash {
  std::size_t operator()(const ContentDigest& d) const noexcept {
    return static_cast<std::size_t>(d[0] ^ (d[1] * 0x9E3779B97F4A7C15ULL));
  }
};

struct Prepared {
  ContentDigest digest{};
  bool repost = false;
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> threads;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace

std::string_view to_string(PostKindTag tag) {
  switch (tag) {
    case PostKindTag::Distinct:
      return "distinct";
    case PostKindTag::Duplicate:
      return "duplicate";
    case PostKindTag::Repost:
      return "repost";
  }
  return "unknown";
}

std::optional<PostKindTag> post_kind_from_name(std::string_view name) {
  for (auto tag : {PostKindTag::Distinct, PostKindTag::Duplicate, PostKindTag::Repost}) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

CorpusPartition::CorpusPartition(std::vector<PartitionEntry> entries, KindCounts counts)
    : entries_(std::move(entries)), counts_(counts) {
  build_index();
}

CorpusPartition& CorpusPartition::operator=(const CorpusPartition& other) {
  if (this != &other) {
    entries_ = other.entries_;
    counts_ = other.counts_;
    build_index();
  }
  return *this;
}

void CorpusPartition::build_index() {
  index_.clear();
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].weibo_id, i).second) {
      throw DuplicateWeiboIdError(entries_[i].weibo_id);
    }
  }
}

const PartitionEntry* CorpusPartition::find(std::string_view weibo_id) const {
  auto it = index_.find(weibo_id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

ContentDigest content_digest(std::string_view normalized) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(normalized.data(), normalized.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("content digest failed");
  }
  ContentDigest d;
  std::memcpy(d.data(), md, sizeof d);
  return d;
}

CorpusPartition partition(std::span<const PostRecord> records, const PartitionOptions& options) {
  const std::size_t n = records.size();

  std::vector<Prepared> prepared(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    prepared[i].repost = detect_repost(records[i], options.repost_rules).is_repost;
    if (!prepared[i].repost) prepared[i].digest = content_digest(normalize_content(records[i].content));
  });

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = records[a];
    const auto& rb = records[b];
    if (ra.timestamp != rb.timestamp) return ra.timestamp < rb.timestamp;
    if (ra.weibo_id != rb.weibo_id) return ra.weibo_id < rb.weibo_id;
    return a < b;
  });

  std::vector<PartitionEntry> entries;
  entries.reserve(n);
  KindCounts counts;
  // digest -> record indices of Distinct posts carrying it (more than one only
  // on a genuine digest collision).
  std::unordered_map<ContentDigest, std::vector<std::size_t>, DigestHash> groups;
  groups.reserve(n / 2 + 1);

  for (std::size_t idx : order) {
    const auto& rec = records[idx];
    PartitionEntry entry{rec.weibo_id, {}, idx};
    if (prepared[idx].repost) {
      entry.kind.tag = PostKindTag::Repost;
      ++counts.repost;
    } else {
      auto& candidates = groups[prepared[idx].digest];
      std::optional<std::size_t> canonical;
      if (!candidates.empty()) {
        const std::string normalized = normalize_content(rec.content);
        for (std::size_t c : candidates) {
          if (normalize_content(records[c].content) == normalized) {
            canonical = c;
            break;
          }
        }
      }
      if (canonical) {
        entry.kind = PostKind{PostKindTag::Duplicate, records[*canonical].weibo_id};
        ++counts.duplicate;
      } else {
        candidates.push_back(idx);
        ++counts.distinct;
      }
    }
    entries.push_back(std::move(entry));
  }
  return CorpusPartition(std::move(entries), counts);
}

void write_partition_summary_csv(std::ostream& out, const CorpusPartition& partition) {
  const auto& c = partition.counts();
  const double total = static_cast<double>(c.total());
  auto fraction = [&](std::size_t k) { return total > 0 ? static_cast<double>(k) / total : 0.0; };
  csv::write_row(out, {"kind", "count", "fraction"});
  csv::write_row(out, {"distinct", std::to_string(c.distinct), csv::format_fixed(fraction(c.distinct), 6)});
  csv::write_row(out, {"duplicate", std::to_string(c.duplicate), csv::format_fixed(fraction(c.duplicate), 6)});
  csv::write_row(out, {"repost", std::to_string(c.repost), csv::format_fixed(fraction(c.repost), 6)});
}

void write_assignments_ndjson(std::ostream& out, const CorpusPartition& partition) {
  for (const auto& e : partition.entries()) {
    nlohmann::json line = {{"weibo_id", e.weibo_id}, {"kind", to_string(e.kind.tag)}};
    if (e.kind.tag == PostKindTag::Duplicate) line["canonical_id"] = e.kind.canonical_id;
    out << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

}  // namespace sentiflow
