#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <string>
#include <string_view>

namespace crynet {

// FIPS 180-4 SHA-256, enough for content hashing of inputs and configs.
class Sha256 {
public:
    Sha256();
    void update(const void* data, size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<uint8_t, 32> digest();
    std::string hex_digest();

    static std::string hash_hex(std::string_view s);
    static std::string hash_file_hex(const std::string& path);

private:
    void process_block(const uint8_t* p);

    std::array<uint32_t, 8> state_;
    uint64_t bit_len_ = 0;
    std::array<uint8_t, 64> buf_{};
    size_t buf_len_ = 0;
    bool done_ = false;
};

}  // namespace crynet
