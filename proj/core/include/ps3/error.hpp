/*
 * Copyright 2026 The PowerSensor3 Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace ps3 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed wire data or an unencodable value.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Sensor configuration violates its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

/// The peer closed the link (EOF, hangup or closed channel).
class TransportClosed : public TransportError {
 public:
  using TransportError::TransportError;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

/// The receiver has stopped; no further state updates will arrive.
class SessionDeadError : public Error {
 public:
  using Error::Error;
};

/// Two measurement states were passed in the wrong order.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// An average was requested over zero elapsed time.
class ZeroIntervalError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace ps3
