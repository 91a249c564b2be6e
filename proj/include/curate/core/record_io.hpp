#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curate/core/document.hpp"

namespace curate {

enum class RecordFormat { Jsonl, JsonlGz, Warc, Wet };

/// Guesses from the extension: .jsonl, .jsonl.gz, .warc[.gz], .wet[.gz].
RecordFormat format_from_path(const std::filesystem::path& path);
/// Accepts "jsonl", "jsonl.gz", "warc", "wet". Throws ConfigError otherwise.
RecordFormat parse_record_format(std::string_view name);

struct RecordError {
  std::uint64_t offset = 0;  // byte offset of the record in the decompressed stream
  std::string message;
};

struct ReaderOptions {
  // Used when the record carries no snapshot and none can be inferred from
  // the file path (a "CC-MAIN-YYYY-WW" component).
  std::string default_snapshot;
};

// Streams documents from one file. Malformed records are skipped and
// recorded in errors(); an unreadable file throws from the constructor.
// gzip input is detected from the bytes, so .gz suffixes are optional.
class RecordReader {
 public:
  RecordReader(const std::filesystem::path& path, RecordFormat format, ReaderOptions options = {});
  ~RecordReader();
  RecordReader(const RecordReader&) = delete;
  RecordReader& operator=(const RecordReader&) = delete;

  std::optional<Document> next();
  const std::vector<RecordError>& errors() const { return errors_; }

 private:
  class Source;
  friend std::vector<Json> read_json_lines(const std::filesystem::path& path);
  std::optional<Document> next_jsonl();
  std::optional<Document> next_warc();
  void assign_id(Document& doc, std::uint64_t index);

  std::unique_ptr<Source> source_;
  RecordFormat format_;
  std::string file_name_;
  std::string snapshot_;
  std::uint64_t record_index_ = 0;
  std::vector<RecordError> errors_;
};

std::vector<Document> read_records(const std::filesystem::path& path, RecordFormat format,
                                   std::vector<RecordError>* errors = nullptr,
                                   ReaderOptions options = {});

// Writes JSONL (optionally gzip-compressed). WARC/WET output is not
// supported. Parent directories are created on open.
class RecordWriter {
 public:
  RecordWriter(const std::filesystem::path& path, RecordFormat format);
  ~RecordWriter();
  RecordWriter(const RecordWriter&) = delete;
  RecordWriter& operator=(const RecordWriter&) = delete;

  void write(const Document& doc);
  void write_json(const Json& j);
  void close();
  std::size_t count() const { return count_; }

 private:
  class Sink;
  std::unique_ptr<Sink> sink_;
  std::size_t count_ = 0;
};

std::size_t write_records(std::span<const Document> docs, const std::filesystem::path& path,
                          RecordFormat format);

/// Extracts "CC-MAIN-YYYY-WW" from a path, or returns an empty string.
/// Every non-blank line of a JSONL(.gz) file parsed as JSON. Throws on a
/// malformed line, naming the file and line number.
std::vector<Json> read_json_lines(const std::filesystem::path& path);

std::string snapshot_from_path(const std::filesystem::path& path);

}  // namespace curate
