#pragma once

#include <coroutine>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "hitset/value.hpp"

namespace hitset {

/// One atomic shared-memory access (or a pure wait step).
///
/// Registers are slots of named arrays; a slot that was never written holds
/// bottom. A snapshot returns `size` slots of an array in one atomic step
/// (`size == 0` means the array's current length).
struct MemoryOp {
  enum class Kind : std::uint8_t { Read, Write, Snapshot, Yield };

  Kind kind = Kind::Yield;
  std::string array;
  int index = 0;
  Value value;
  int size = 0;
  /// Writing a non-bottom slot again is a protocol fault.
  bool write_once = false;
  /// Free-form phase tag recorded in traces; schedules may react to it.
  std::string label;

  static MemoryOp read(std::string array, int index, std::string label = {}) {
    MemoryOp op;
    op.kind = Kind::Read;
    op.array = std::move(array);
    op.index = index;
    op.label = std::move(label);
    return op;
  }
  static MemoryOp write(std::string array, int index, Value value, std::string label = {}) {
    MemoryOp op;
    op.kind = Kind::Write;
    op.array = std::move(array);
    op.index = index;
    op.value = std::move(value);
    op.label = std::move(label);
    return op;
  }
  static MemoryOp write_once_op(std::string array, int index, Value value, std::string label = {}) {
    MemoryOp op = write(std::move(array), index, std::move(value), std::move(label));
    op.write_once = true;
    return op;
  }
  static MemoryOp snapshot(std::string array, int size, std::string label = {}) {
    MemoryOp op;
    op.kind = Kind::Snapshot;
    op.array = std::move(array);
    op.size = size;
    op.label = std::move(label);
    return op;
  }
  static MemoryOp yield(std::string label = {}) {
    MemoryOp op;
    op.label = std::move(label);
    return op;
  }
};

const char* op_name(MemoryOp::Kind kind);

namespace detail {

/// Type-erased view of a running machine, used to forward a parent's
/// pending op to the sub-machine it is awaiting.
class Steppable {
 public:
  virtual ~Steppable() = default;
  [[nodiscard]] virtual const MemoryOp& pending() const = 0;
  virtual void feed(Value result) = 0;
  [[nodiscard]] virtual bool done() const = 0;
};

}  // namespace detail

/// A resumable step machine: a coroutine that issues MemoryOps one at a time
/// and eventually returns a T.
///
/// Inside a Machine coroutine:
///   Value r = co_await MemoryOp::read("R", 0);   // one shared-memory step
///   U u = co_await some_sub_machine(...);          // runs a sub-protocol inline
///
/// Driving from outside: start(), then while !done(): execute pending() and
/// feed() its result.
template <class T>
class Machine final : public detail::Steppable {
 public:
  struct promise_type;
  using Handle = std::coroutine_handle<promise_type>;

  Machine() = default;
  explicit Machine(Handle h) : h_(h) {}
  Machine(Machine&& other) noexcept
      : h_(std::exchange(other.h_, {})), started_(std::exchange(other.started_, false)) {}
  Machine& operator=(Machine&& other) noexcept {
    if (this != &other) {
      reset();
      h_ = std::exchange(other.h_, {});
      started_ = std::exchange(other.started_, false);
    }
    return *this;
  }
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;
  ~Machine() override { reset(); }

  [[nodiscard]] bool valid() const { return static_cast<bool>(h_); }
  [[nodiscard]] bool started() const { return started_; }

  /// Runs local computation up to the first op (or completion).
  void start() {
    if (!started_) {
      started_ = true;
      resume();
    }
  }

  [[nodiscard]] bool done() const override { return started_ && h_.done(); }

  [[nodiscard]] const MemoryOp& pending() const override {
    const auto& p = h_.promise();
    return p.delegate != nullptr ? p.delegate->pending() : p.op;
  }

  void feed(Value result) override {
    auto& p = h_.promise();
    if (p.delegate != nullptr) {
      p.delegate->feed(std::move(result));
      if (p.delegate->done()) resume();
      return;
    }
    p.input = std::move(result);
    resume();
  }

  [[nodiscard]] const T& result() const { return *h_.promise().result; }
  T take() { return std::move(*h_.promise().result); }

  struct promise_type {
    std::optional<T> result;
    std::exception_ptr error;
    MemoryOp op;
    Value input;
    detail::Steppable* delegate = nullptr;

    Machine get_return_object() { return Machine(Handle::from_promise(*this)); }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void unhandled_exception() { error = std::current_exception(); }
    template <class U>
    void return_value(U&& v) {
      result.emplace(std::forward<U>(v));
    }

    struct OpAwaiter {
      promise_type& p;
      bool await_ready() const noexcept { return false; }
      void await_suspend(std::coroutine_handle<>) const noexcept {}
      Value await_resume() const { return std::move(p.input); }
    };

    template <class U>
    struct SubAwaiter {
      promise_type& p;
      Machine<U> child;
      bool await_ready() {
        child.start();
        return child.done();
      }
      void await_suspend(std::coroutine_handle<>) noexcept { p.delegate = &child; }
      U await_resume() {
        p.delegate = nullptr;
        return child.take();
      }
    };

    OpAwaiter await_transform(MemoryOp next) {
      op = std::move(next);
      return OpAwaiter{*this};
    }

    template <class U>
    SubAwaiter<U> await_transform(Machine<U>&& child) {
      return SubAwaiter<U>{*this, std::move(child)};
    }
  };

 private:
  void resume() {
    h_.resume();
    if (h_.done() && h_.promise().error) std::rethrow_exception(h_.promise().error);
  }
  void reset() {
    if (h_) h_.destroy();
    h_ = {};
    started_ = false;
  }

  Handle h_{};
  bool started_ = false;
};

/// A process: builds a fresh machine (its initial local state, including pid
/// and input, is bound in) whose result is the process output.
using ProcessProgram = std::function<Machine<Value>()>;

/// A protocol parametrized by process id and task input.
using ProtocolFactory = std::function<Machine<Value>(int pid, Value input)>;

}  // namespace hitset
