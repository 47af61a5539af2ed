#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace codevoice::pipeline {

struct StoredBlob {
  std::string bytes;
  std::string media_type;
};

/// Content-addressed blob directory:
///   <root>/<first 2 hex of SHA-256>/<full hex>        blob bytes
///   <root>/<first 2 hex of SHA-256>/<full hex>.mime   media type
/// Files are written to a temporary name and renamed into place.
class BlobStore {
 public:
  explicit BlobStore(std::filesystem::path root);

  /// Stores the bytes and returns their SHA-256 hex digest.
  std::string put(std::string_view bytes, std::string_view media_type);
  std::optional<StoredBlob> get(std::string_view hex) const;
  std::filesystem::path path_for(std::string_view hex) const;
  const std::filesystem::path& root() const { return root_; }

  static std::string sha256_hex(std::string_view bytes);

 private:
  std::filesystem::path root_;
};

}  // namespace codevoice::pipeline
