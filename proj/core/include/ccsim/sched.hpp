#ifndef CCSIM_SCHED_HPP
#define CCSIM_SCHED_HPP

#include <coroutine>
#include <cstdint>
#include <exception>
#include <utility>
#include <vector>

#include "ccsim/system.hpp"

namespace ccsim {

// A per-core workload program. The coroutine suspends after every simulated
// operation, so the scheduler interleaves cores at one-operation granularity.
class CoreProgram {
 public:
  struct promise_type {
    CoreProgram get_return_object() {
      return CoreProgram(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { exception = std::current_exception(); }
    std::exception_ptr exception;
  };
  using Handle = std::coroutine_handle<promise_type>;

  CoreProgram() = default;
  explicit CoreProgram(Handle h) : h_(h) {}
  CoreProgram(CoreProgram&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  CoreProgram& operator=(CoreProgram&& o) noexcept {
    if (this != &o) {
      destroy();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  CoreProgram(const CoreProgram&) = delete;
  CoreProgram& operator=(const CoreProgram&) = delete;
  ~CoreProgram() { destroy(); }

  bool done() const { return !h_ || h_.done(); }
  void resume() {
    h_.resume();
    if (h_.done() && h_.promise().exception) std::rethrow_exception(h_.promise().exception);
  }

 private:
  void destroy() {
    if (h_) h_.destroy();
    h_ = {};
  }
  Handle h_;
};

// Round-robin, one operation per core per turn. Deterministic: given the
// same programs, the interleaving is identical.
class Scheduler {
 public:
  explicit Scheduler(System& sys) : sys_(&sys) {}

  // Core ids are assigned in spawn order.
  uint32_t spawn(CoreProgram prog) {
    cores_.push_back(State{std::move(prog)});
    return static_cast<uint32_t>(cores_.size() - 1);
  }

  System& system() { return *sys_; }
  uint32_t core_count() const { return static_cast<uint32_t>(cores_.size()); }

  bool all_done() const {
    for (const auto& c : cores_)
      if (!c.prog.done()) return false;
    return true;
  }

  // Advance the next runnable core by one operation. Returns false when no
  // core is runnable (all finished, or every live core waits at a barrier).
  bool step() {
    uint32_t n = core_count();
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t c = (cursor_ + i) % n;
      State& st = cores_[c];
      if (st.prog.done() || st.in_barrier) continue;
      cursor_ = c + 1;
      st.progressed = true;  // ops may clear this (failed lock attempts)
      st.prog.resume();
      return st.progressed;
    }
    return false;
  }

  // Run to completion. A full round in which no live core completes an
  // operation is a deadlock.
  void run() {
    while (!all_done()) {
      bool any_progress = false;
      bool any_resumed = false;
      uint32_t n = core_count();
      for (uint32_t c = 0; c < n; ++c) {
        State& st = cores_[c];
        if (st.prog.done() || st.in_barrier) continue;
        any_resumed = true;
        st.progressed = true;
        st.prog.resume();
        any_progress = any_progress || st.progressed;
      }
      if (!any_progress && !all_done()) {
        raise(ErrorCode::DeadlockDetected,
              any_resumed ? "no core completed an operation for a full round"
                          : "all live cores are blocked at a barrier");
      }
    }
  }

  // --- services used by CoreContext ---

  void note_progress(uint32_t core, bool progressed) { cores_[core].progressed = progressed; }

  void barrier_arrive(uint32_t core) {
    cores_[core].in_barrier = true;
    if (++barrier_arrived_ == core_count()) {
      sys_->sync_cores_to_max();
      for (auto& c : cores_) c.in_barrier = false;
      barrier_arrived_ = 0;
    }
  }

 private:
  struct State {
    CoreProgram prog;
    bool in_barrier = false;
    bool progressed = false;
  };
  System* sys_;
  std::vector<State> cores_;
  uint32_t cursor_ = 0;
  uint32_t barrier_arrived_ = 0;
};

namespace detail {

template <class F>
struct [[nodiscard]] OpAwait {
  Scheduler* sched;
  uint32_t core;
  F f;
  uint64_t result = 0;
  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<>) {
    result = f();
    sched->note_progress(core, true);
  }
  uint64_t await_resume() const noexcept { return result; }
};
template <class F>
OpAwait(Scheduler*, uint32_t, F) -> OpAwait<F>;

template <class F>
struct [[nodiscard]] TryAwait {
  Scheduler* sched;
  uint32_t core;
  F f;
  bool ok = false;
  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<>) {
    ok = f();
    sched->note_progress(core, ok);
  }
  bool await_resume() const noexcept { return ok; }
};
template <class F>
TryAwait(Scheduler*, uint32_t, F) -> TryAwait<F>;

struct [[nodiscard]] BarrierAwait {
  Scheduler* sched;
  uint32_t core;
  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<>) { sched->barrier_arrive(core); }
  void await_resume() const noexcept {}
};

}  // namespace detail

// The interface workload programs use to issue one operation per turn.
// Every co_await executes its operation and then yields to the scheduler.
class CoreContext {
 public:
  CoreContext(Scheduler& sched, uint32_t core) : sched_(&sched), core_(core) {}

  System& sys() const { return sched_->system(); }
  uint32_t core() const { return core_; }
  const CacheConfig& config() const { return sys().config(); }

  auto load(uint64_t addr) {
    return detail::OpAwait{sched_, core_, [this, addr] {
                             return sys().access(core_, addr, AccessKind::Load).value;
                           }};
  }
  auto store(uint64_t addr, uint64_t value) {
    return detail::OpAwait{sched_, core_, [this, addr, value] {
                             return sys().access(core_, addr, AccessKind::Store, value).value;
                           }};
  }
  auto amo_or(uint64_t addr, uint64_t bits) {
    return detail::OpAwait{sched_, core_,
                           [this, addr, bits] { return sys().amo_or(core_, addr, bits).value; }};
  }
  auto tick(uint64_t cycles) {
    return detail::OpAwait{sched_, core_, [this, cycles] {
                             sys().tick(core_, cycles);
                             return uint64_t{0};
                           }};
  }
  auto c_read(uint64_t addr, unsigned slot) {
    return detail::OpAwait{sched_, core_, [this, addr, slot] {
                             return sys().c_read(core_, addr, slot).value;
                           }};
  }
  auto c_write(uint64_t addr, uint64_t value, unsigned slot) {
    return detail::OpAwait{sched_, core_, [this, addr, value, slot] {
                             return sys().c_write(core_, addr, value, slot).value;
                           }};
  }
  auto merge_init(const std::string& fn, unsigned slot) {
    return detail::OpAwait{sched_, core_, [this, fn, slot] {
                             sys().merge_init(core_, fn, slot);
                             return uint64_t{0};
                           }};
  }
  auto soft_merge() {
    return detail::OpAwait{sched_, core_, [this] { return sys().soft_merge(core_); }};
  }
  auto merge() {
    return detail::OpAwait{sched_, core_, [this] { return sys().merge(core_).merged; }};
  }

  // One test-and-set attempt on an ordinary lock word; spin by re-awaiting:
  //   while (!co_await ctx.try_lock(a)) {}
  auto try_lock(uint64_t lock_addr) {
    return detail::TryAwait{sched_, core_, [this, lock_addr] {
                              return sys().amo_swap(core_, lock_addr, 1).value == 0;
                            }};
  }
  auto unlock(uint64_t lock_addr) {
    return detail::OpAwait{sched_, core_, [this, lock_addr] {
                             return sys().access(core_, lock_addr, AccessKind::Store, 0).value;
                           }};
  }

  auto barrier() { return detail::BarrierAwait{sched_, core_}; }

 private:
  Scheduler* sched_;
  uint32_t core_;
};

}  // namespace ccsim

#endif
