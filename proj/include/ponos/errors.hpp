#pragma once
// Error taxonomy shared by all ponos modules. Every failure the engine can
// raise maps to one ErrorKind so the CLI can translate it into an exit code.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ponos {

enum class ErrorKind {
    empty_input,
    no_replies,
    zero_weight,
    invalid_timestamp,
    dimension_mismatch,
    zero_vector,
    shape_mismatch,
    join_mismatch,
    parse,
    corrupt_corpus,
    missing_content,
    missing_gold,
    template_render,
    transport,
    backend_unavailable,
    unparseable_label,
    generation_incomplete,
    config,
    io,
    invalid_argument,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::empty_input: return "EmptyInput";
        case ErrorKind::no_replies: return "NoReplies";
        case ErrorKind::zero_weight: return "ZeroWeight";
        case ErrorKind::invalid_timestamp: return "InvalidTimestamp";
        case ErrorKind::dimension_mismatch: return "DimensionError";
        case ErrorKind::zero_vector: return "ZeroVector";
        case ErrorKind::shape_mismatch: return "ShapeError";
        case ErrorKind::join_mismatch: return "JoinError";
        case ErrorKind::parse: return "ParseError";
        case ErrorKind::corrupt_corpus: return "CorruptCorpus";
        case ErrorKind::missing_content: return "MissingContent";
        case ErrorKind::missing_gold: return "MissingGold";
        case ErrorKind::template_render: return "TemplateError";
        case ErrorKind::transport: return "TransportError";
        case ErrorKind::backend_unavailable: return "BackendUnavailable";
        case ErrorKind::unparseable_label: return "UnparseableLabel";
        case ErrorKind::generation_incomplete: return "GenerationIncomplete";
        case ErrorKind::config: return "ConfigError";
        case ErrorKind::io: return "IoError";
        case ErrorKind::invalid_argument: return "InvalidArgument";
    }
    return "Error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return to_string(kind_); }

private:
    ErrorKind kind_;
};

#define PONOS_DEFINE_ERROR(Type, Kind)                                        \
    class Type : public Error {                                               \
    public:                                                                   \
        explicit Type(const std::string& message) : Error(Kind, message) {}   \
    }

PONOS_DEFINE_ERROR(EmptyInputError, ErrorKind::empty_input);
PONOS_DEFINE_ERROR(NoRepliesError, ErrorKind::no_replies);
PONOS_DEFINE_ERROR(ZeroWeightError, ErrorKind::zero_weight);
PONOS_DEFINE_ERROR(InvalidTimestampError, ErrorKind::invalid_timestamp);
PONOS_DEFINE_ERROR(DimensionError, ErrorKind::dimension_mismatch);
PONOS_DEFINE_ERROR(ZeroVectorError, ErrorKind::zero_vector);
PONOS_DEFINE_ERROR(ShapeError, ErrorKind::shape_mismatch);
PONOS_DEFINE_ERROR(JoinError, ErrorKind::join_mismatch);
PONOS_DEFINE_ERROR(ParseError, ErrorKind::parse);
PONOS_DEFINE_ERROR(CorruptCorpusError, ErrorKind::corrupt_corpus);
PONOS_DEFINE_ERROR(MissingContentError, ErrorKind::missing_content);
PONOS_DEFINE_ERROR(MissingGoldError, ErrorKind::missing_gold);
PONOS_DEFINE_ERROR(TemplateError, ErrorKind::template_render);
PONOS_DEFINE_ERROR(TransportError, ErrorKind::transport);
PONOS_DEFINE_ERROR(BackendUnavailableError, ErrorKind::backend_unavailable);
PONOS_DEFINE_ERROR(UnparseableLabelError, ErrorKind::unparseable_label);
PONOS_DEFINE_ERROR(ConfigError, ErrorKind::config);
PONOS_DEFINE_ERROR(IoError, ErrorKind::io);
PONOS_DEFINE_ERROR(InvalidArgumentError, ErrorKind::invalid_argument);

#undef PONOS_DEFINE_ERROR

// Carries how many replies were actually parsed out of the requested k.
class GenerationIncompleteError : public Error {
public:
    GenerationIncompleteError(std::size_t obtained, std::size_t requested)
        : Error(ErrorKind::generation_incomplete,
                "parsed " + std::to_string(obtained) + " of " + std::to_string(requested) +
                    " requested replies"),
          obtained_(obtained),
          requested_(requested) {}

    std::size_t obtained() const noexcept { return obtained_; }
    std::size_t requested() const noexcept { return requested_; }

private:
    std::size_t obtained_;
    std::size_t requested_;
};

}  // namespace ponos
