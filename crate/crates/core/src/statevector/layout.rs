use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// A named, contiguous block of qubits. Bit `i` of the register's value is qubit `offset + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    name: String,
    offset: usize,
    width: usize,
}

impl Register {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn qubits(&self) -> Range<usize> {
        self.offset..self.offset + self.width
    }

    pub fn qubit(&self, bit: usize) -> usize {
        assert!(bit < self.width, "bit {bit} outside register `{}`", self.name);
        self.offset + bit
    }

    pub fn qubit_list(&self) -> Vec<usize> {
        self.qubits().collect()
    }
}

/// Ordered set of registers; qubit indices are assigned in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    num_qubits: usize,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, width: usize) -> Result<Range<usize>> {
        if self.registers.iter().any(|r| r.name == name) {
            return Err(Error::DuplicateRegister(name.to_string()));
        }
        let reg = Register {
            name: name.to_string(),
            offset: self.num_qubits,
            width,
        };
        self.num_qubits += width;
        let range = reg.qubits();
        self.registers.push(reg);
        Ok(range)
    }

    pub fn with(mut self, name: &str, width: usize) -> Result<Self> {
        self.push(name, width)?;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn get(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }
}
