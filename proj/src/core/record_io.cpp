#include "curate/core/record_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <map>
#include <regex>

#include "curate/core/error.hpp"

namespace curate {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

// Buffered reader over a gzFile (zlib reads plain files transparently).
class RecordReader::Source {
 public:
  explicit Source(const std::filesystem::path& path) {
    file_ = gzopen(path.c_str(), "rb");
    if (!file_) throw Error("cannot open input file: " + path.string());
    gzbuffer(file_, 1 << 17);
  }
  ~Source() {
    if (file_) gzclose(file_);
  }

  std::uint64_t offset() const { return offset_; }

  // Reads one line without its terminating '\n'. Returns false at EOF.
  bool getline(std::string& line) {
    line.clear();
    bool any = false;
    for (;;) {
      if (pos_ == len_ && !fill()) return any;
      any = true;
      const char* begin = buf_ + pos_;
      const char* nl = static_cast<const char*>(std::memchr(begin, '\n', len_ - pos_));
      if (nl) {
        const std::size_t n = static_cast<std::size_t>(nl - begin);
        line.append(begin, n);
        pos_ += n + 1;
        offset_ += n + 1;
        return true;
      }
      line.append(begin, len_ - pos_);
      offset_ += len_ - pos_;
      pos_ = len_;
    }
  }

  // Reads exactly n bytes (fewer only at EOF).
  std::size_t read(std::string& out, std::size_t n) {
    out.clear();
    out.reserve(n);
    while (out.size() < n) {
      if (pos_ == len_ && !fill()) break;
      const std::size_t take = std::min(n - out.size(), len_ - pos_);
      out.append(buf_ + pos_, take);
      pos_ += take;
      offset_ += take;
    }
    return out.size();
  }

 private:
  bool fill() {
    const int got = gzread(file_, buf_, sizeof(buf_));
    if (got < 0) {
      int errnum = 0;
      throw Error(std::string("read error: ") + gzerror(file_, &errnum));
    }
    pos_ = 0;
    len_ = static_cast<std::size_t>(got);
    return len_ > 0;
  }

  gzFile file_ = nullptr;
  char buf_[1 << 16];
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
  std::uint64_t offset_ = 0;
};

std::vector<Json> read_json_lines(const std::filesystem::path& path) {
  RecordReader::Source source(path);
  std::vector<Json> out;
  std::string line;
  std::size_t line_no = 0;
  while (source.getline(line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw Error(path.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

class RecordWriter::Sink {
 public:
  Sink(const std::filesystem::path& path, bool gzip) : gzip_(gzip), path_(path) {
    if (path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
    }
    if (gzip_) {
      gz_ = gzopen(path.c_str(), "wb6");
      if (!gz_) throw Error("cannot open output file: " + path.string());
    } else {
      plain_ = std::fopen(path.c_str(), "wb");
      if (!plain_) throw Error("cannot open output file: " + path.string());
    }
  }
  ~Sink() { close(); }

  void write(std::string_view bytes) {
    if (bytes.empty()) return;
    if (gzip_) {
      if (gzwrite(gz_, bytes.data(), static_cast<unsigned>(bytes.size())) != static_cast<int>(bytes.size())) {
        throw Error("write failed: " + path_.string());
      }
    } else if (std::fwrite(bytes.data(), 1, bytes.size(), plain_) != bytes.size()) {
      throw Error("write failed: " + path_.string());
    }
  }

  void close() {
    if (gz_) {
      const int rc = gzclose(gz_);
      gz_ = nullptr;
      if (rc != Z_OK) throw Error("close failed: " + path_.string());
    }
    if (plain_) {
      const int rc = std::fclose(plain_);
      plain_ = nullptr;
      if (rc != 0) throw Error("close failed: " + path_.string());
    }
  }

 private:
  bool gzip_;
  std::filesystem::path path_;
  gzFile gz_ = nullptr;
  std::FILE* plain_ = nullptr;
};

RecordFormat format_from_path(const std::filesystem::path& path) {
  std::string name = lower(path.filename().string());
  if (ends_with(name, ".jsonl.gz") || ends_with(name, ".json.gz")) return RecordFormat::JsonlGz;
  if (ends_with(name, ".gz")) name.resize(name.size() - 3);
  if (ends_with(name, ".wet")) return RecordFormat::Wet;
  if (ends_with(name, ".warc")) return RecordFormat::Warc;
  return RecordFormat::Jsonl;
}

RecordFormat parse_record_format(std::string_view name) {
  if (name == "jsonl") return RecordFormat::Jsonl;
  if (name == "jsonl.gz") return RecordFormat::JsonlGz;
  if (name == "warc") return RecordFormat::Warc;
  if (name == "wet") return RecordFormat::Wet;
  throw ConfigError("unknown record format '" + std::string(name) + "'");
}

std::string snapshot_from_path(const std::filesystem::path& path) {
  static const std::regex pattern(R"(CC-MAIN-\d{4}-\d{2})");
  std::smatch m;
  const std::string s = path.string();
  if (std::regex_search(s, m, pattern)) return m.str();
  return {};
}

RecordReader::RecordReader(const std::filesystem::path& path, RecordFormat format,
                           ReaderOptions options)
    : source_(std::make_unique<Source>(path)),
      format_(format),
      file_name_(path.filename().string()) {
  snapshot_ = snapshot_from_path(path);
  if (snapshot_.empty()) snapshot_ = options.default_snapshot;
}

RecordReader::~RecordReader() = default;

std::optional<Document> RecordReader::next() {
  if (format_ == RecordFormat::Jsonl || format_ == RecordFormat::JsonlGz) return next_jsonl();
  return next_warc();
}

void RecordReader::assign_id(Document& doc, std::uint64_t index) {
  if (doc.snapshot.empty()) doc.snapshot = snapshot_;
  if (doc.id.empty()) doc.id = doc.snapshot + "/" + file_name_ + "#" + std::to_string(index);
}

std::optional<Document> RecordReader::next_jsonl() {
  std::string line;
  for (;;) {
    const std::uint64_t offset = source_->offset();
    if (!source_->getline(line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::uint64_t index = record_index_++;
    try {
      Document doc = document_from_json(Json::parse(line));
      assign_id(doc, index);
      return doc;
    } catch (const std::exception& e) {
      errors_.push_back({offset, e.what()});
    }
  }
}

std::optional<Document> RecordReader::next_warc() {
  std::string line;
  for (;;) {
    // Skip the blank lines separating records.
    std::uint64_t offset = source_->offset();
    bool got = false;
    while ((got = source_->getline(line))) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) break;
      offset = source_->offset();
    }
    if (!got) return std::nullopt;
    if (line.rfind("WARC/", 0) != 0) {
      errors_.push_back({offset, "expected WARC version line, got '" + line.substr(0, 40) + "'"});
      // Resynchronise on the next version line.
      for (;;) {
        offset = source_->offset();
        if (!source_->getline(line)) return std::nullopt;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("WARC/", 0) == 0) break;
      }
    }

    std::map<std::string, std::string> headers;  // keys lower-cased
    while (source_->getline(line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) break;
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      headers[lower(trim(std::string_view(line).substr(0, colon)))] =
          trim(std::string_view(line).substr(colon + 1));
    }
    auto length_it = headers.find("content-length");
    std::size_t length = 0;
    try {
      if (length_it == headers.end()) throw Error("missing Content-Length");
      std::size_t used = 0;
      length = std::stoull(length_it->second, &used);
      if (used != length_it->second.size()) throw Error("bad Content-Length");
    } catch (const std::exception&) {
      errors_.push_back({offset, "missing or invalid Content-Length"});
      continue;
    }
    std::string payload;
    if (source_->read(payload, length) != length) {
      errors_.push_back({offset, "truncated payload"});
      return std::nullopt;
    }

    const std::string type = lower(headers["warc-type"]);
    const bool is_text = type == "conversion";
    const bool is_html = type == "response" || type == "resource";
    if (!is_text && !is_html) continue;  // warcinfo, request, metadata, ...

    Document doc;
    doc.url = headers["warc-target-uri"];
    std::string record_id = headers["warc-record-id"];
    if (record_id.size() >= 2 && record_id.front() == '<' && record_id.back() == '>') {
      record_id = record_id.substr(1, record_id.size() - 2);
    }
    doc.id = record_id;
    if (auto it = headers.find("warc-date"); it != headers.end()) doc.extra["warc_date"] = it->second;
    if (is_text) {
      doc.text = std::move(payload);
    } else {
      std::string body = payload;
      if (type == "response") {
        auto split = payload.find("\r\n\r\n");
        std::size_t skip = 4;
        if (split == std::string::npos) {
          split = payload.find("\n\n");
          skip = 2;
        }
        body = split == std::string::npos ? std::string() : payload.substr(split + skip);
      }
      doc.extra["html"] = std::move(body);
    }
    assign_id(doc, record_index_++);
    return doc;
  }
}

std::vector<Document> read_records(const std::filesystem::path& path, RecordFormat format,
                                   std::vector<RecordError>* errors, ReaderOptions options) {
  RecordReader reader(path, format, std::move(options));
  std::vector<Document> docs;
  while (auto doc = reader.next()) docs.push_back(std::move(*doc));
  if (errors) *errors = reader.errors();
  return docs;
}

RecordWriter::RecordWriter(const std::filesystem::path& path, RecordFormat format) {
  if (format != RecordFormat::Jsonl && format != RecordFormat::JsonlGz) {
    throw Error("writing is only supported for jsonl and jsonl.gz: " + path.string());
  }
  sink_ = std::make_unique<Sink>(path, format == RecordFormat::JsonlGz);
}

RecordWriter::~RecordWriter() = default;

void RecordWriter::write(const Document& doc) {
  try {
    write_json(to_json(doc));
  } catch (const nlohmann::json::exception& e) {
    throw Error("cannot serialize document '" + doc.id + "': " + e.what());
  }
}

void RecordWriter::write_json(const Json& j) {
  std::string line = j.dump(-1, ' ', false, Json::error_handler_t::strict);
  line.push_back('\n');
  sink_->write(line);
  ++count_;
}

void RecordWriter::close() { sink_->close(); }

std::size_t write_records(std::span<const Document> docs, const std::filesystem::path& path,
                          RecordFormat format) {
  RecordWriter writer(path, format);
  for (const auto& d : docs) writer.write(d);
  writer.close();
  return writer.count();
}

}  // namespace curate
