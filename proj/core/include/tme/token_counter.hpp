#pragma once

#include <map>
#include <string>

namespace tme {

// Deterministic prompt-size measurement. Implementations must return the
// same count for the same text.
class TokenCounter {
public:
    virtual ~TokenCounter() = default;
    virtual int count(const std::string& text) const = 0;
};

// Heuristic counter for relative comparisons when no recorded table exists:
// each alphanumeric run counts 1 plus one extra per started block of eight
// characters beyond the first, and every other non-space character counts 1.
class ApproximateCounter : public TokenCounter {
public:
    int count(const std::string& text) const override;
};

// Exact replay counter: maps sha256(prompt text) to the measured token count
// recorded in a fixture. Misses raise UnrecordedPrompt.
class RecordedCounter : public TokenCounter {
public:
    explicit RecordedCounter(std::map<std::string, int> table) : table_(std::move(table)) {}

    // Loads a JSON object file mapping hash -> tokens.
    static RecordedCounter from_file(const std::string& path);

    int count(const std::string& text) const override;
    bool covers(const std::string& text) const;

private:
    std::map<std::string, int> table_;
};

} // namespace tme
