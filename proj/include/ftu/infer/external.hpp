#pragma once

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <string>
#include <vector>

#include "ftu/core/binary.hpp"
#include "ftu/infer/predictor.hpp"
#include "ftu/infer/protocol.hpp"

extern char** environ;

namespace ftu::infer {

/// Long-lived child process speaking the PRD1/PRB1/ERR1 protocol on its
/// stdin/stdout. The command is run through `/bin/sh -c`. Calls are
/// serialized with a mutex, so one instance may be shared by all workers.
class ExternalPredictor final : public Predictor {
public:
    explicit ExternalPredictor(std::string command, std::string label = {})
        : command_(std::move(command)), label_(label.empty() ? command_ : std::move(label)) {
        // A dead child must surface as EPIPE, not kill the host process.
        ::signal(SIGPIPE, SIG_IGN);
        spawn();
    }

    ~ExternalPredictor() override { shutdown(); }

    ExternalPredictor(const ExternalPredictor&) = delete;
    ExternalPredictor& operator=(const ExternalPredictor&) = delete;

    ProbMap predict(const ByteImage& tile) const override {
        auto maps = predict_batch(std::span<const ByteImage>(&tile, 1));
        return std::move(maps.front());
    }

    std::vector<ProbMap> predict_batch(std::span<const ByteImage> tiles) const override {
        if (tiles.empty()) return {};
        const std::string request = protocol::encode_request(tiles);
        std::lock_guard lock(mutex_);
        if (!write_all(request)) {
            // The child may have answered with ERR1 before exiting.
            read_reply_or_throw(tiles);
            throw PredictorError(label_ + ": predictor closed its input");
        }
        return read_reply_or_throw(tiles);
    }

    std::string name() const override { return label_; }

private:
    void spawn() {
        int to_child[2];
        int from_child[2];
        // Close-on-exec so sibling predictor processes never hold each other's pipes.
        if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0) {
            throw PredictorError(label_ + ": pipe() failed: " + std::strerror(errno));
        }
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
        std::string sh = "/bin/sh", dash_c = "-c";
        std::vector<char*> argv = {sh.data(), dash_c.data(), command_.data(), nullptr};
        const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(to_child[0]);
        ::close(from_child[1]);
        if (rc != 0) {
            ::close(to_child[1]);
            ::close(from_child[0]);
            throw PredictorError(label_ + ": cannot spawn predictor: " + std::strerror(rc));
        }
        stdin_fd_ = to_child[1];
        stdout_fd_ = from_child[0];
    }

    void shutdown() noexcept {
        if (stdin_fd_ >= 0) ::close(stdin_fd_);
        if (stdout_fd_ >= 0) ::close(stdout_fd_);
        stdin_fd_ = stdout_fd_ = -1;
        if (pid_ > 0) {
            int status = 0;
            ::waitpid(pid_, &status, 0);
            pid_ = -1;
        }
    }

    bool write_all(std::string_view bytes) const {
        std::size_t done = 0;
        while (done < bytes.size()) {
            const ssize_t n = ::write(stdin_fd_, bytes.data() + done, bytes.size() - done);
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            done += static_cast<std::size_t>(n);
        }
        return true;
    }

    std::string read_exact(std::size_t n) const {
        std::string buf(n, '\0');
        std::size_t done = 0;
        while (done < n) {
            const ssize_t r = ::read(stdout_fd_, buf.data() + done, n - done);
            if (r < 0 && errno == EINTR) continue;
            if (r <= 0) {
                throw PredictorError(label_ + ": predictor output ended after " + std::to_string(done) +
                                     " of " + std::to_string(n) + " bytes");
            }
            done += static_cast<std::size_t>(r);
        }
        return buf;
    }

    std::vector<ProbMap> read_reply_or_throw(std::span<const ByteImage> tiles) const {
        const std::string magic = read_exact(4);
        if (magic == protocol::kErrorMagic) {
            binary::Reader len(read_exact(4), "predictor error frame");
            const std::string message = read_exact(len.u32());
            throw PredictorError(label_ + ": " + message);
        }
        if (magic != protocol::kResponseMagic) {
            throw PredictorError(label_ + ": unexpected frame magic '" + magic + "'");
        }
        const std::string header = read_exact(12);
        binary::Reader in(header, "predictor response");
        protocol::FrameShape s;
        s.count = in.u32();
        s.height = in.u32();
        s.width = in.u32();
        if (s.count != tiles.size() || s.height != tiles[0].height() || s.width != tiles[0].width()) {
            throw PredictorError(label_ + ": response shape " + std::to_string(s.count) + "x" +
                                 std::to_string(s.height) + "x" + std::to_string(s.width) +
                                 " does not match request");
        }
        const std::string body = read_exact(static_cast<std::size_t>(s.count) * s.height * s.width * 4);
        return protocol::decode_response_body(s, body);
    }

    std::string command_;
    std::string label_;
    pid_t pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
    mutable std::mutex mutex_;
};

} // namespace ftu::infer
