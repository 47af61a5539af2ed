#include "codevoice/blob_store.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace codevoice::pipeline {

namespace fs = std::filesystem;

namespace {

std::atomic<unsigned long> g_tmp_counter{0};

void write_atomically(const fs::path& target, std::string_view bytes) {
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(g_tmp_counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename blob into " + target.string());
  }
}

bool is_hex_digest(std::string_view hex) {
  if (hex.size() != 64) return false;
  for (const char c : hex) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

BlobStore::BlobStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

std::string BlobStore::sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

fs::path BlobStore::path_for(std::string_view hex) const {
  return root_ / std::string(hex.substr(0, 2)) / std::string(hex);
}

std::string BlobStore::put(std::string_view bytes, std::string_view media_type) {
  const std::string hex = sha256_hex(bytes);
  const fs::path target = path_for(hex);
  fs::create_directories(target.parent_path());
  if (!fs::exists(target)) write_atomically(target, bytes);
  fs::path mime = target;
  mime += ".mime";
  write_atomically(mime, media_type);
  return hex;
}

std::optional<StoredBlob> BlobStore::get(std::string_view hex) const {
  if (!is_hex_digest(hex)) return std::nullopt;
  const fs::path target = path_for(hex);
  std::ifstream in(target, std::ios::binary);
  if (!in) return std::nullopt;
  StoredBlob blob;
  std::ostringstream buf;
  buf << in.rdbuf();
  blob.bytes = buf.str();
  fs::path mime = target;
  mime += ".mime";
  std::ifstream min(mime);
  std::getline(min, blob.media_type);
  if (blob.media_type.empty()) blob.media_type = "application/octet-stream";
  return blob;
}

}  // namespace codevoice::pipeline
