#include "textmill/mixer.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"

namespace textmill {

std::vector<StagePlan> plan_schedule(const MixtureSpec& spec, std::int64_t total_tokens,
                                     std::int64_t stage1_tokens) {
  if (total_tokens <= 0) throw ConfigError("plan_schedule: total_tokens must be > 0");
  if (stage1_tokens <= 0 || stage1_tokens >= total_tokens) {
    throw ConfigError("plan_schedule: stage1_tokens must be in (0, total_tokens)");
  }
  // Stage 2 trains on every partition the spec gives weight to.
  std::set<Partition> stage2 = {Partition::D1};
  for (const auto& e : spec.entries) {
    if (e.percent > 0.0) stage2.insert(e.partition);
  }
  return {
      {1, stage1_tokens, {Partition::D1}},
      {2, total_tokens - stage1_tokens, stage2},
  };
}

std::string schedule_to_json(const std::vector<StagePlan>& plans) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& p : plans) {
    nlohmann::ordered_json j;
    j["stage_id"] = p.stage_id;
    j["token_budget"] = p.token_budget;
    auto parts = nlohmann::ordered_json::array();
    for (Partition part : p.active_partitions) parts.push_back(std::string(to_string(part)));
    j["active_partitions"] = std::move(parts);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

FileDocSource::FileDocSource(std::vector<std::string> globs, ReadPolicy policy)
    : files_(expand_globs(globs)), policy_(std::move(policy)) {
  reset();
}

void FileDocSource::reset() {
  reader_ = std::make_unique<DocumentReader>(files_, policy_);
}

std::optional<Document> FileDocSource::next() {
  while (auto rec = reader_->next()) {
    if (std::holds_alternative<Document>(*rec)) {
      return std::get<Document>(std::move(*rec));
    }
  }
  return std::nullopt;
}

std::string InterleaveState::to_json() const {
  nlohmann::ordered_json j;
  j["total_tokens"] = total_tokens;
  j["total_docs"] = total_docs;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : sources) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    js["weight"] = s.weight;
    js["emitted_tokens"] = s.emitted_tokens;
    js["emitted_docs_epoch"] = s.emitted_docs_epoch;
    js["epoch"] = s.epoch;
    js["exhausted"] = s.exhausted;
    arr.push_back(std::move(js));
  }
  j["sources"] = std::move(arr);
  return j.dump(2);
}

InterleaveState InterleaveState::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  InterleaveState st;
  st.total_tokens = j.at("total_tokens").get<std::int64_t>();
  st.total_docs = j.at("total_docs").get<std::uint64_t>();
  for (const auto& js : j.at("sources")) {
    SourceState s;
    s.name = js.at("name").get<std::string>();
    s.weight = js.at("weight").get<double>();
    s.emitted_tokens = js.at("emitted_tokens").get<std::uint64_t>();
    s.emitted_docs_epoch = js.at("emitted_docs_epoch").get<std::uint64_t>();
    s.epoch = js.at("epoch").get<std::uint64_t>();
    s.exhausted = js.at("exhausted").get<bool>();
    st.sources.push_back(std::move(s));
  }
  return st;
}

Interleaver::Interleaver(std::vector<std::pair<WeightEntry, DocSource*>> sources,
                         InterleaveConfig cfg)
    : cfg_(cfg) {
  for (auto& [weight, source] : sources) {
    if (weight.percent < 0.0) {
      throw ConfigError("interleave: negative weight for " + weight.name);
    }
    if (weight.percent == 0.0) continue;
    Entry e;
    e.weight = weight;
    e.source = source;
    e.tie_key = mix64(cfg_.seed ^ hash64(weight.name));
    e.buffered = source->next();
    if (!e.buffered) {
      throw ConfigError("interleave: empty stream for nonzero-weight source " +
                        weight.name);
    }
    entries_.push_back(std::move(e));
    state_.sources.push_back({weight.name, weight.percent, 0, 0, 0, false});
  }
  if (entries_.empty()) throw ConfigError("interleave: no weighted sources");
}

std::optional<Document> Interleaver::pull(std::size_t i) {
  Entry& e = entries_[i];
  SourceState& s = state_.sources[i];
  if (e.buffered) {
    auto doc = std::move(e.buffered);
    e.buffered.reset();
    return doc;
  }
  auto doc = e.source->next();
  if (doc) return doc;
  if (cfg_.exhaust == ExhaustPolicy::Reloop) {
    e.source->reset();
    s.epoch += 1;
    s.emitted_docs_epoch = 0;
    doc = e.source->next();
    if (doc) return doc;
  }
  s.exhausted = true;
  warnings_.push_back("source " + s.name + " exhausted after " +
                      std::to_string(s.emitted_tokens) + " tokens; " +
                      (cfg_.exhaust == ExhaustPolicy::Reloop
                           ? "stream is empty"
                           : "renormalizing over remaining sources"));
  return std::nullopt;
}

std::optional<Document> Interleaver::next() {
  if (state_.total_tokens >= cfg_.token_budget) return std::nullopt;
  while (true) {
    // pick the live source with the largest weight deficit
    std::size_t best = entries_.size();
    double best_ratio = std::numeric_limits<double>::max();
    std::uint64_t best_tie = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const SourceState& s = state_.sources[i];
      if (s.exhausted) continue;
      double ratio = static_cast<double>(s.emitted_tokens) / s.weight;
      if (ratio < best_ratio ||
          (ratio == best_ratio && entries_[i].tie_key < best_tie)) {
        best = i;
        best_ratio = ratio;
        best_tie = entries_[i].tie_key;
      }
    }
    if (best == entries_.size()) return std::nullopt;  // everything exhausted

    auto doc = pull(best);
    if (!doc) continue;  // source just went dry; reselect

    SourceState& s = state_.sources[best];
    std::uint64_t tokens = std::max<std::uint64_t>(1, doc->token_count);
    s.emitted_tokens += tokens;
    s.emitted_docs_epoch += 1;
    state_.total_tokens += static_cast<std::int64_t>(tokens);
    state_.total_docs += 1;
    return doc;
  }
}

void Interleaver::restore(const InterleaveState& saved) {
  if (saved.sources.size() != entries_.size()) {
    throw ConfigError("interleave restore: source count mismatch");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (saved.sources[i].name != state_.sources[i].name) {
      throw ConfigError("interleave restore: source order mismatch at " +
                        saved.sources[i].name);
    }
  }
  state_ = saved;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    Entry& e = entries_[i];
    e.buffered.reset();
    e.source->reset();
    for (std::uint64_t skip = 0; skip < saved.sources[i].emitted_docs_epoch; ++skip) {
      if (!e.source->next()) {
        throw ConfigError("interleave restore: source " + saved.sources[i].name +
                          " shorter than saved state");
      }
    }
  }
}

}  // namespace textmill
