#pragma once

#include <condition_variable>
#include <deque>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "trackfuse/tracklet.hpp"

namespace trackfuse {

/// Pull-side of a message transport. next() yields messages until the stream
/// ends, then nullopt forever.
class MessageSource {
public:
    virtual ~MessageSource() = default;
    virtual std::optional<TrackletMessage> next() = 0;
};

/// In-process queue backend. Any number of producer threads may push
/// concurrently; one consumer drains with next(), which blocks until a
/// message arrives or the queue is closed.
class QueueTransport final : public MessageSource {
public:
    void push(TrackletMessage msg);
    void close();
    std::optional<TrackletMessage> next() override;

private:
    std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<TrackletMessage> queue_;
    bool closed_ = false;
};

/// Replay backend over a newline-delimited message stream. Blank lines are
/// skipped; malformed lines surface as DecodeError with their line number.
class StreamReplaySource final : public MessageSource {
public:
    explicit StreamReplaySource(std::istream& in) : in_(in) {}
    std::optional<TrackletMessage> next() override;

private:
    std::istream& in_;
    std::size_t lineno_ = 0;
};

/// StreamReplaySource that owns the underlying file.
class FileReplaySource final : public MessageSource {
public:
    explicit FileReplaySource(const std::string& path);
    std::optional<TrackletMessage> next() override { return inner_->next(); }

private:
    std::ifstream file_;
    std::unique_ptr<StreamReplaySource> inner_;
};

} // namespace trackfuse
