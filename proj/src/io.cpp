// Copyright 2026 The littertrack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "littertrack/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <json.hpp>
#include <unistd.h>

#include "littertrack/error.hpp"

namespace littertrack::io {

static_assert(std::endian::native == std::endian::little,
              "embedding files are read and written in host byte order");

namespace fs = std::filesystem;

LabelTable::LabelTable() {
  const char* defaults[] = {"person", "bottle", "handbag",  "backpack", "umbrella",
                            "banana", "apple",  "cup",      "book",     "wallet",
                            "suitcase", "orange", "sports_ball", "bowl"};
  int id = 1;
  for (const char* name : defaults) set(id++, name);
}

void LabelTable::set(int id, const std::string& label) {
  if (label.empty()) throw ConfigError(fmt::format("labels.{} must not be empty", id));
  auto old = by_id_.find(id);
  if (old != by_id_.end()) by_label_.erase(old->second);
  auto clash = by_label_.find(label);
  if (clash != by_label_.end() && clash->second != id) {
    throw ConfigError(fmt::format("label '{}' is already bound to class {}", label, clash->second));
  }
  by_id_[id] = label;
  by_label_[label] = id;
}

const std::string& LabelTable::label(int id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw InputError(fmt::format("unknown class id {}", id));
  return it->second;
}

int LabelTable::id(const std::string& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) throw InputError(fmt::format("class '{}' has no id in the label table", label));
  return it->second;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view text, const fs::path& path, std::size_t line, const char* what) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw InputError(fmt::format("{}:{}: bad {} '{}'", path.string(), line, what, t));
  }
  return value;
}

struct Row {
  std::size_t line = 0;
  FrameIndex frame = 0;
  TrackId id = 0;
  BoundingBox box;
  double conf = 0.0;
  int cls = 0;
  double visibility = 1.0;
};

void parse_header_line(const std::string& line, Header& header) {
  const std::string body = trim(std::string_view(line).substr(1));
  const auto colon = body.find(':');
  if (colon == std::string::npos) return;  // free-form comment
  header[trim(std::string_view(body).substr(0, colon))] =
      trim(std::string_view(body).substr(colon + 1));
}

std::vector<Row> parse_rows(const fs::path& path, Header& header) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::vector<Row> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      parse_header_line(t, header);
      continue;
    }
    std::vector<std::string_view> cols;
    std::string_view rest(t);
    for (;;) {
      const auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols.size() != 9) {
      throw InputError(fmt::format("{}:{}: expected 9 columns, found {}", path.string(), n, cols.size()));
    }
    Row r;
    r.line = n;
    r.frame = parse_number<FrameIndex>(cols[0], path, n, "frame");
    r.id = parse_number<TrackId>(cols[1], path, n, "id");
    r.box = {parse_number<double>(cols[2], path, n, "left"), parse_number<double>(cols[3], path, n, "top"),
             parse_number<double>(cols[4], path, n, "width"), parse_number<double>(cols[5], path, n, "height")};
    r.conf = parse_number<double>(cols[6], path, n, "confidence");
    r.cls = parse_number<int>(cols[7], path, n, "class");
    r.visibility = parse_number<double>(cols[8], path, n, "visibility");
    if (!is_valid(r.box)) {
      throw InputError(fmt::format("{}:{}: degenerate box (width {}, height {})", path.string(), n,
                                   r.box.width, r.box.height));
    }
    if (!std::isfinite(r.conf) || r.conf < 0.0 || r.conf > 1.0) {
      throw InputError(fmt::format("{}:{}: confidence {} outside [0, 1]", path.string(), n, r.conf));
    }
    rows.push_back(r);
  }
  if (!std::is_sorted(rows.begin(), rows.end(),
                      [](const Row& a, const Row& b) { return a.frame < b.frame; })) {
    spdlog::warn("{}: rows are not in frame order; reordering", path.string());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.frame < b.frame; });
  }
  return rows;
}

std::string header_text(const Header& header) {
  std::string out;
  for (const auto& [k, v] : header) out += fmt::format("# {}: {}\n", k, v);
  return out;
}

std::string row_text(FrameIndex frame, TrackId id, const BoundingBox& b, double conf, int cls,
                     int visibility) {
  return fmt::format("{},{},{},{},{},{},{},{},{}\n", frame, id, b.left, b.top, b.width, b.height,
                     conf, cls, visibility);
}

}  // namespace

DetectionFile parse_detections(const fs::path& path, const LabelTable& labels) {
  DetectionFile out;
  for (const Row& r : parse_rows(path, out.header)) {
    if (r.id != -1) {
      throw InputError(fmt::format("{}:{}: detection rows must carry id -1, found {}",
                                   path.string(), r.line, r.id));
    }
    Detection d;
    d.frame = r.frame;
    d.box = r.box;
    d.confidence = r.conf;
    try {
      d.class_label = labels.label(r.cls);
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}:{}: {}", path.string(), r.line, e.what()));
    }
    out.frames[r.frame].push_back(std::move(d));
  }
  return out;
}

TrackFile parse_tracks(const fs::path& path, const LabelTable& labels) {
  TrackFile out;
  std::map<TrackId, Track> tracks;
  for (const Row& r : parse_rows(path, out.header)) {
    if (r.id < 0) {
      throw InputError(fmt::format("{}:{}: track rows need a non-negative id", path.string(), r.line));
    }
    std::string label;
    try {
      label = labels.label(r.cls);
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}:{}: {}", path.string(), r.line, e.what()));
    }
    Track& t = tracks[r.id];
    if (t.history.empty()) {
      t.id = r.id;
      t.class_label = label;
    } else if (t.class_label != label) {
      throw InputError(fmt::format("{}:{}: track {} changes class from '{}' to '{}'", path.string(),
                                   r.line, r.id, t.class_label, label));
    }
    if (!t.history.emplace(r.frame, HistoryEntry{r.box, r.conf, r.visibility == 0.0}).second) {
      throw InputError(fmt::format("{}:{}: duplicate row for track {} at frame {}", path.string(),
                                   r.line, r.id, r.frame));
    }
  }
  for (auto& [id, t] : tracks) out.tracks.push_back(std::move(t));
  return out;
}

void write_detections(const fs::path& path, const FrameDetections& frames, const LabelTable& labels,
                      const Header& header) {
  std::string out = header_text(header);
  for (const auto& [frame, dets] : frames) {
    for (const Detection& d : dets) {
      out += row_text(frame, -1, d.box, d.confidence, labels.id(d.class_label), 1);
    }
  }
  atomic_write(path, out);
}

void write_tracks(const fs::path& path, std::span<const Track> tracks, const LabelTable& labels,
                  const Header& header) {
  struct Ref {
    FrameIndex frame;
    TrackId id;
    int cls;
    const HistoryEntry* entry;
  };
  std::vector<Ref> refs;
  for (const Track& t : tracks) {
    const int cls = labels.id(t.class_label);
    for (const auto& [f, e] : t.history) refs.push_back({f, t.id, cls, &e});
  }
  std::sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
    return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
  });
  std::string out = header_text(header);
  for (const Ref& r : refs) {
    out += row_text(r.frame, r.id, r.entry->box, r.entry->confidence, r.cls,
                    r.entry->interpolated ? 0 : 1);
  }
  atomic_write(path, out);
}

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::uint32_t kPartialFlag = 1u;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& data, const fs::path& path) : data_(data), path_(path) {}

  template <typename T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > data_.size()) {
      throw InputError(fmt::format("{}: truncated embedding file while reading {}", path_.string(), what));
    }
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n, const char* what) {
    if (pos_ + n > data_.size()) {
      throw InputError(fmt::format("{}: truncated embedding file while reading {}", path_.string(), what));
    }
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  const std::string& data_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

EmbeddingFile load_embeddings(const fs::path& path) {
  const std::string data = read_file(path);
  Reader in(data, path);
  if (in.bytes(4, "magic") != std::string(kMagic, 4)) {
    throw InputError(fmt::format("{}: not an EMB1 embedding file", path.string()));
  }
  EmbeddingFile out;
  out.dimension = in.get<std::uint32_t>("dimension");
  if (out.dimension == 0) throw InputError(fmt::format("{}: embedding dimension is 0", path.string()));
  out.partial = (in.get<std::uint32_t>("flags") & kPartialFlag) != 0;
  const auto count = in.get<std::uint64_t>("record count");
  out.meta = in.bytes(in.get<std::uint32_t>("meta length"), "meta");
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto frame = in.get<std::int64_t>("frame");
    const auto index = in.get<std::uint32_t>("index");
    Embedding v(out.dimension);
    for (float& x : v) x = in.get<float>("vector");
    try {
      v = normalized(v);
    } catch (const Error& e) {
      throw InputError(fmt::format("{}: record {} (frame {}, index {}): {}", path.string(), i, frame,
                                   index, e.what()));
    }
    if (!out.vectors.emplace(std::make_pair(frame, index), std::move(v)).second) {
      throw InputError(fmt::format("{}: duplicate record for frame {}, index {}", path.string(), frame, index));
    }
  }
  if (!in.done()) throw InputError(fmt::format("{}: trailing bytes after {} records", path.string(), count));
  return out;
}

void write_embeddings(const fs::path& path, const EmbeddingFile& file) {
  std::string out(kMagic, 4);
  put<std::uint32_t>(out, file.dimension);
  put<std::uint32_t>(out, file.partial ? kPartialFlag : 0u);
  put<std::uint64_t>(out, file.vectors.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(file.meta.size()));
  out += file.meta;
  for (const auto& [key, v] : file.vectors) {
    if (v.size() != file.dimension) {
      throw InputError(fmt::format("embedding at frame {} has dimension {}, file declares {}",
                                   key.first, v.size(), file.dimension));
    }
    put<std::int64_t>(out, key.first);
    put<std::uint32_t>(out, key.second);
    for (float x : v) put<float>(out, x);
  }
  atomic_write(path, out);
}

EmbeddingFile collect_embeddings(const FrameDetections& frames, std::uint32_t dimension,
                                 std::string meta) {
  EmbeddingFile out;
  out.dimension = dimension;
  out.meta = std::move(meta);
  for (const auto& [frame, dets] : frames) {
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (dets[i].embedding) {
        out.vectors[{frame, static_cast<std::uint32_t>(i)}] = *dets[i].embedding;
      } else {
        out.partial = true;
      }
    }
  }
  return out;
}

void attach_embeddings(FrameDetections& frames, const EmbeddingFile& file) {
  for (auto& [frame, dets] : frames) {
    for (std::size_t i = 0; i < dets.size(); ++i) {
      auto it = file.vectors.find({frame, static_cast<std::uint32_t>(i)});
      if (it != file.vectors.end()) {
        dets[i].embedding = it->second;
      } else if (!file.partial) {
        throw InputError(fmt::format(
            "embedding file lacks detection {} of frame {} and is not marked partial", i, frame));
      }
    }
  }
  for (const auto& [key, v] : file.vectors) {
    auto it = frames.find(key.first);
    if (it == frames.end() || key.second >= it->second.size()) {
      throw InputError(fmt::format("embedding record (frame {}, index {}) has no detection",
                                   key.first, key.second));
    }
  }
}

void save_gallery(const fs::path& prefix, const identity::IdentityGallery& gallery) {
  EmbeddingFile file;
  file.dimension = static_cast<std::uint32_t>(gallery.dimension());
  file.meta = "gallery";
  std::string labels;
  std::uint32_t index = 0;
  for (const auto& [label, v] : gallery.entries()) {
    file.vectors[{0, index}] = v;
    const auto meta = gallery.metadata().find(label);
    labels += fmt::format("{}\t{}\t{}\n", index, label,
                          meta == gallery.metadata().end() ? "" : meta->second);
    ++index;
  }
  write_embeddings(fs::path(prefix.string() + ".emb"), file);
  atomic_write(fs::path(prefix.string() + ".labels"), labels);
}

identity::IdentityGallery load_gallery(const fs::path& prefix) {
  const fs::path emb_path(prefix.string() + ".emb");
  const fs::path label_path(prefix.string() + ".labels");
  const EmbeddingFile file = load_embeddings(emb_path);
  identity::IdentityGallery gallery(file.dimension);
  std::istringstream in(read_file(label_path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw InputError(fmt::format("{}:{}: expected index<TAB>label<TAB>metadata", label_path.string(), n));
    }
    const auto index = parse_number<std::uint32_t>(std::string_view(line).substr(0, t1), label_path, n, "index");
    auto it = file.vectors.find({0, index});
    if (it == file.vectors.end()) {
      throw InputError(fmt::format("{}:{}: no vector with index {}", label_path.string(), n, index));
    }
    std::string meta = line.substr(t2 + 1);
    if (!meta.empty() && meta.back() == '\r') meta.pop_back();
    gallery.enroll(line.substr(t1 + 1, t2 - t1 - 1), it->second, std::move(meta));
  }
  if (gallery.size() != file.vectors.size()) {
    throw InputError(fmt::format("{}: {} labels for {} vectors", label_path.string(), gallery.size(),
                                 file.vectors.size()));
  }
  return gallery;
}

std::string event_line(const events::EventRecord& e, const EventContext& ctx) {
  nlohmann::ordered_json j;
  j["scenario"] = ctx.scenario;
  j["digest"] = ctx.digest;
  j["engine"] = ctx.engine;
  j["kind"] = events::to_string(e.kind);
  j["frame"] = e.frame;
  j["litter_track"] = e.litter_track;
  j["person_track"] = e.person_track ? nlohmann::ordered_json(*e.person_track) : nullptr;
  j["identity"] = e.identity ? nlohmann::ordered_json(*e.identity) : nullptr;
  j["confidence"] = e.confidence;
  j["evidence"] = e.evidence;
  return j.dump();
}

void write_events(const fs::path& path, std::span<const events::EventRecord> events,
                  const EventContext& ctx) {
  std::string out;
  for (const auto& e : events) out += event_line(e, ctx) + "\n";
  atomic_write(path, out);
}

EventFile parse_events(const fs::path& path) {
  EventFile out;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t n = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      EventContext ctx{j.at("scenario").get<std::string>(), j.at("digest").get<std::string>(),
                       j.at("engine").get<std::string>()};
      if (first) {
        out.context = ctx;
        first = false;
      } else if (ctx.digest != out.context.digest) {
        throw InputError(fmt::format("config digest {} differs from {}", ctx.digest, out.context.digest));
      }
      events::EventRecord e;
      e.kind = events::parse_event_kind(j.at("kind").get<std::string>());
      e.frame = j.at("frame").get<FrameIndex>();
      e.litter_track = j.at("litter_track").get<TrackId>();
      if (!j.at("person_track").is_null()) e.person_track = j.at("person_track").get<TrackId>();
      if (!j.at("identity").is_null()) e.identity = j.at("identity").get<std::string>();
      e.confidence = j.at("confidence").get<double>();
      e.evidence = j.at("evidence").get<double>();
      out.events.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw InputError(fmt::format("{}:{}: {}", path.string(), n, ex.what()));
    } catch (const InputError& ex) {
      throw InputError(fmt::format("{}:{}: {}", path.string(), n, ex.what()));
    }
  }
  return out;
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + fmt::format(".tmp{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw InputError(fmt::format("write to '{}' failed", path.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError(fmt::format("cannot move temporary file onto '{}'", path.string()));
  }
}

}  // namespace littertrack::io
