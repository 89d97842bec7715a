// Loopback predictor for the PRD1/PRB1 protocol: answers each request with
// one input channel of every tile (the green channel of RGB input by default).
//
//   ftu-echo-predictor [--channel K] [--constant P] [--fail MESSAGE]

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "ftu/core/binary.hpp"
#include "ftu/infer/protocol.hpp"

namespace {

bool read_exact(std::string& buf, std::size_t n) {
    buf.resize(n);
    return n == 0 || std::fread(buf.data(), 1, n, stdin) == n;
}

void emit(const std::string& bytes) {
    std::fwrite(bytes.data(), 1, bytes.size(), stdout);
    std::fflush(stdout);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Echo predictor"};
    std::optional<std::size_t> channel;
    std::optional<float> constant;
    std::string fail;
    app.add_option("--channel", channel, "Channel to echo (default: 1 for RGB, 0 for gray)");
    app.add_option("--constant", constant, "Answer with this probability everywhere");
    app.add_option("--fail", fail, "Answer every request with an ERR1 frame");
    CLI11_PARSE(app, argc, argv);

    using namespace ftu::infer::protocol;
    std::string header, body;
    while (read_exact(header, 20)) {
        FrameShape s;
        try {
            s = decode_request_header(header);
        } catch (const ftu::Error& e) {
            emit(encode_error(e.what()));
            return 1;
        }
        const std::size_t plane = static_cast<std::size_t>(s.height) * s.width;
        if (!read_exact(body, static_cast<std::size_t>(s.count) * plane * s.channels * 4)) {
            emit(encode_error("truncated request"));
            return 1;
        }
        if (!fail.empty()) {
            emit(encode_error(fail));
            continue;
        }
        const std::size_t k = channel.value_or(s.channels == 3 ? 1 : 0);
        if (k >= s.channels) {
            emit(encode_error("channel " + std::to_string(k) + " not present"));
            continue;
        }
        std::string out;
        out.reserve(16 + s.count * plane * 4);
        ftu::binary::put_magic(out, kResponseMagic);
        ftu::binary::put_u32(out, s.count);
        ftu::binary::put_u32(out, s.height);
        ftu::binary::put_u32(out, s.width);
        ftu::binary::Reader in(body, "request body");
        for (std::size_t t = 0; t < s.count; ++t) {
            for (std::size_t i = 0; i < plane; ++i) {
                float v = 0.0f;
                for (std::size_t c = 0; c < s.channels; ++c) {
                    const float x = in.f32();
                    if (c == k) v = x;
                }
                ftu::binary::put_f32(out, constant ? *constant : v);
            }
        }
        emit(out);
    }
    return 0;
}
