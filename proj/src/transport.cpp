#include "trackfuse/transport.hpp"

#include "trackfuse/errors.hpp"

namespace trackfuse {

void QueueTransport::push(TrackletMessage msg) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (closed_) throw TimeError("push on a closed transport");
        queue_.push_back(std::move(msg));
    }
    ready_.notify_one();
}

void QueueTransport::close() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        closed_ = true;
    }
    ready_.notify_all();
}

std::optional<TrackletMessage> QueueTransport::next() {
    std::unique_lock<std::mutex> lock(mutex_);
    ready_.wait(lock, [this] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    TrackletMessage msg = std::move(queue_.front());
    queue_.pop_front();
    return msg;
}

std::optional<TrackletMessage> StreamReplaySource::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++lineno_;
        if (line.empty() || line == "\r") continue;
        try {
            return decode_message(line);
        } catch (const DecodeError& e) {
            throw DecodeError("line " + std::to_string(lineno_) + ": " + e.what());
        }
    }
    return std::nullopt;
}

FileReplaySource::FileReplaySource(const std::string& path) : file_(path) {
    if (!file_) throw IoError("cannot open message file " + path);
    inner_ = std::make_unique<StreamReplaySource>(file_);
}

} // namespace trackfuse
