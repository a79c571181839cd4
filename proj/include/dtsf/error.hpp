#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtsf {

enum class ErrorCode {
	InvalidArgument,
	Io,
	MalformedRecord,
	IrregularSpacing,
	EmptySeries,
	InsufficientData,
	DegenerateWindow,
	DegenerateTarget,
	TooFewMatches,
	LengthMismatch,
	ZeroDenominator,
	AllConfigsFailed,
};

inline const char* error_code_name(ErrorCode code) {
	switch (code) {
	case ErrorCode::InvalidArgument: return "InvalidArgument";
	case ErrorCode::Io: return "Io";
	case ErrorCode::MalformedRecord: return "MalformedRecord";
	case ErrorCode::IrregularSpacing: return "IrregularSpacing";
	case ErrorCode::EmptySeries: return "EmptySeries";
	case ErrorCode::InsufficientData: return "InsufficientData";
	case ErrorCode::DegenerateWindow: return "DegenerateWindow";
	case ErrorCode::DegenerateTarget: return "DegenerateTarget";
	case ErrorCode::TooFewMatches: return "TooFewMatches";
	case ErrorCode::LengthMismatch: return "LengthMismatch";
	case ErrorCode::ZeroDenominator: return "ZeroDenominator";
	case ErrorCode::AllConfigsFailed: return "AllConfigsFailed";
	}
	return "Unknown";
}

/// Library error carrying a machine-readable code and, where one makes
/// sense, the offending index (CSV line, observation index, match count).
class Error : public std::runtime_error {
public:
	Error(ErrorCode code, const std::string& message, std::int64_t index = -1)
		: std::runtime_error(message), code_(code), index_(index) {}

	ErrorCode code() const noexcept { return code_; }
	std::int64_t index() const noexcept { return index_; }

private:
	ErrorCode code_;
	std::int64_t index_;
};

} // namespace dtsf
