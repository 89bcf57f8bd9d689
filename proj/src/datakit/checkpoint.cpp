// Copyright 2026 The symmocc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "symmocc/datakit/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace symmocc {

namespace {

constexpr std::array<char, 8> kMagic{'S', 'Y', 'M', 'M', 'O', 'C', 'C', '\0'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    template <typename T>
    void le(T v) {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                     std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
        auto u = std::bit_cast<U>(v);
        for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
    }
    void str(const std::string& s) {
        le(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void values(const Tensor& t) {
        for (Real v : t.values()) le(v);
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

    const std::uint8_t* need(std::size_t n, const std::string& what) {
        if (b_.size() - pos_ < n) {
            throw std::runtime_error("checkpoint truncated at byte offset " + std::to_string(b_.size()) +
                                     " while reading " + what + " (needed " + std::to_string(n) + " bytes at offset " +
                                     std::to_string(pos_) + ")");
        }
        const std::uint8_t* p = b_.data() + pos_;
        pos_ += n;
        return p;
    }
    template <typename T>
    T le(const std::string& what) {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                     std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
        const std::uint8_t* p = need(sizeof(U), what);
        U u = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
        return std::bit_cast<T>(u);
    }
    std::string str(const std::string& what) {
        const auto n = le<std::uint32_t>(what + " length");
        if (n > 4096) throw std::runtime_error("checkpoint: implausible " + what + " length at offset " + std::to_string(pos_));
        const std::uint8_t* p = need(n, what);
        return std::string(reinterpret_cast<const char*>(p), n);
    }
    void values(Tensor& t, const std::string& what) {
        for (Real& v : t.data()) v = le<double>(what);
    }
    std::size_t pos() const { return pos_; }
    bool done() const { return pos_ == b_.size(); }

private:
    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Network& net, const AdamState* state) {
    const auto params = net.parameters();
    if (state && state->step > 0 && (state->m.size() != params.size() || state->v.size() != params.size())) {
        throw std::invalid_argument("checkpoint: optimizer state does not match the parameter list");
    }
    Writer w;
    w.bytes(kMagic.data(), kMagic.size());
    w.le(kCheckpointVersion);
    w.str(to_string(net.variant()));
    w.le(net.channel_scale());
    w.le(net.seed());
    w.le(static_cast<std::uint8_t>(net.options().alter_mirror ? 1 : 0));
    w.le(static_cast<std::uint32_t>(params.size()));
    for (const Parameter* p : params) {
        w.str(p->name);
        const Shape& s = p->value.shape();
        for (std::size_t d : {s.batch, s.channels, s.height, s.width}) w.le(static_cast<std::uint32_t>(d));
        w.values(p->value);
    }
    const bool with_state = state && state->m.size() == params.size();
    w.le(static_cast<std::uint8_t>(with_state ? 1 : 0));
    if (with_state) {
        w.le(state->step);
        for (const Tensor& m : state->m) w.values(m);
        for (const Tensor& v : state->v) w.values(v);
    }
    return w.take();
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    const std::uint8_t* magic = r.need(kMagic.size(), "magic");
    if (std::memcmp(magic, kMagic.data(), kMagic.size()) != 0) throw std::runtime_error("checkpoint: bad magic");
    const auto version = r.le<std::uint32_t>("version");
    if (version != kCheckpointVersion) {
        throw std::runtime_error("checkpoint: format version " + std::to_string(version) + " unsupported (expected " +
                                 std::to_string(kCheckpointVersion) + ")");
    }
    const Variant variant = parse_variant(r.str("variant"));
    const auto scale = r.le<double>("channel_scale");
    const auto seed = r.le<std::uint64_t>("seed");
    const auto flags = r.le<std::uint8_t>("flags");
    BuildOptions opt;
    opt.alter_mirror = (flags & 1u) != 0;

    Network net = Network::build(variant, scale, seed, opt);
    auto params = net.parameters();
    const auto count = r.le<std::uint32_t>("parameter count");
    if (count != params.size()) {
        throw std::runtime_error("checkpoint: " + std::to_string(count) + " parameters but " + to_string(variant) +
                                 " has " + std::to_string(params.size()));
    }
    for (Parameter* p : params) {
        const std::string name = r.str("parameter name");
        if (name != p->name) throw std::runtime_error("checkpoint: expected parameter '" + p->name + "', found '" + name + "'");
        std::array<std::size_t, 4> dims{};
        for (auto& d : dims) d = r.le<std::uint32_t>(name + " shape");
        const Shape expect = p->value.shape();
        if (Shape{dims[0], dims[1], dims[2], dims[3]} != expect) {
            throw std::runtime_error("checkpoint: parameter '" + name + "' has shape " +
                                     Shape{dims[0], dims[1], dims[2], dims[3]}.str() + ", variant expects " + expect.str());
        }
        r.values(p->value, name + " values");
    }
    Checkpoint ck{std::move(net), std::nullopt};
    if (r.le<std::uint8_t>("optimizer flag") == 1) {
        auto cparams = ck.network.parameters();
        AdamState st = AdamState::for_parameters(cparams);
        st.step = r.le<std::uint64_t>("optimizer step");
        for (Tensor& m : st.m) r.values(m, "optimizer first moment");
        for (Tensor& v : st.v) r.values(v, "optimizer second moment");
        ck.optimizer = std::move(st);
    }
    if (!r.done()) throw std::runtime_error("checkpoint: trailing bytes after offset " + std::to_string(r.pos()));
    return ck;
}

void save_checkpoint(const Network& net, const AdamState* state, const std::filesystem::path& path) {
    const auto bytes = serialize_checkpoint(net, state);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return deserialize_checkpoint(bytes);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace symmocc
