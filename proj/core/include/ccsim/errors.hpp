#ifndef CCSIM_ERRORS_HPP
#define CCSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ccsim {

enum class ErrorCode {
  CoherentAccessToCData,   // Load/Store touched a privatized (CData) line
  SetPinned,               // every way of a set is pinned by privatized lines
  SourceBufferFull,        // no free or flushable source-buffer entry
  UnknownMergeFunction,    // merge_init with an id not in the catalog
  MergeSlotEmpty,          // COp names an unpopulated MFRF slot
  NoMergeInFlight,         // rd_mreg/wr_mreg outside a merge
  WriteToReadOnlyRegister, // wr_mreg to the source or updated register
  UnlockWithoutLock,       // LLC line unlock by a non-holder
  MergeFunctionOutOfBounds,// merge function touched non-register state
  ZeroSourceFactor,        // multiplicative merge with |src| == 0
  DeadlockDetected,        // no core progressed for a full scheduler round
  ZeroCycleRun,            // normalization over a zero-cycle run
  BadConfig,               // configuration violates a structural invariant
  Io,                      // file read/write failure
  Internal,                // simulator bug (broken internal invariant)
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::CoherentAccessToCData: return "CoherentAccessToCData";
    case ErrorCode::SetPinned: return "SetPinned";
    case ErrorCode::SourceBufferFull: return "SourceBufferFull";
    case ErrorCode::UnknownMergeFunction: return "UnknownMergeFunction";
    case ErrorCode::MergeSlotEmpty: return "MergeSlotEmpty";
    case ErrorCode::NoMergeInFlight: return "NoMergeInFlight";
    case ErrorCode::WriteToReadOnlyRegister: return "WriteToReadOnlyRegister";
    case ErrorCode::UnlockWithoutLock: return "UnlockWithoutLock";
    case ErrorCode::MergeFunctionOutOfBounds: return "MergeFunctionOutOfBounds";
    case ErrorCode::ZeroSourceFactor: return "ZeroSourceFactor";
    case ErrorCode::DeadlockDetected: return "DeadlockDetected";
    case ErrorCode::ZeroCycleRun: return "ZeroCycleRun";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

class SimError : public std::runtime_error {
 public:
  SimError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw SimError(code, what);
}

}  // namespace ccsim

#endif
