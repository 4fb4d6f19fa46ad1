//! Link budget, noise powers and diode Taylor coefficients.

use core::f64::consts::PI;

use libm::{log10, pow};

use crate::{Error, Result};

/// Boltzmann constant (J/K), exact since the 2019 SI redefinition.
pub const BOLTZMANN: f64 = 1.380649e-23;

pub fn db_to_linear(db: f64) -> f64 {
    pow(10.0, db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * log10(linear)
}

/// Physical parameters of the link and the rectifier. Gains are linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Transmit power (W).
    pub transmit_power: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    /// Carrier wavelength (m).
    pub wavelength: f64,
    /// Transmitter-receiver distance (m).
    pub distance: f64,
    /// Diode reverse saturation current (A).
    pub saturation_current: f64,
    pub ideality: f64,
    /// Thermal voltage (V).
    pub thermal_voltage: f64,
    /// Antenna impedance (Ohm).
    pub antenna_impedance: f64,
    /// Signal bandwidth (Hz).
    pub bandwidth: f64,
    /// Temperature (K).
    pub temperature: f64,
    /// Rectifier noise power as a multiple of the thermal noise power.
    pub rec_noise_ratio: f64,
    /// LNA power gain.
    pub lna_gain: f64,
}

impl Default for SystemParams {
    /// The reference parameter set: 3 GHz carrier, 10 m line-of-sight link,
    /// 20 dBi / 3 dBi antennas, a Schottky diode with `i_s = 5 uA`,
    /// `n = 1.05`, `v_t = 25.86 mV`, 50 Ohm antenna, 10 MHz at 300 K, and a
    /// rectifier noise 30 dB above the thermal floor. The LNA gain defaults
    /// to 0 dB.
    fn default() -> Self {
        SystemParams {
            transmit_power: 1.0,
            tx_gain: db_to_linear(20.0),
            rx_gain: db_to_linear(3.0),
            wavelength: 0.1,
            distance: 10.0,
            saturation_current: 5e-6,
            ideality: 1.05,
            thermal_voltage: 25.86e-3,
            antenna_impedance: 50.0,
            bandwidth: 10e6,
            temperature: 300.0,
            rec_noise_ratio: 1e3,
            lna_gain: 1.0,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, "must be finite and strictly positive"))
    }
}

impl SystemParams {
    pub fn with_lna_gain(mut self, lna_gain: f64) -> Self {
        self.lna_gain = lna_gain;
        self
    }

    /// Checks the record invariants. The rectifier noise ratio may be zero
    /// (noiseless-rectifier limit); every other field must be positive.
    pub fn validate(&self) -> Result<()> {
        positive("transmit_power", self.transmit_power)?;
        positive("tx_gain", self.tx_gain)?;
        positive("rx_gain", self.rx_gain)?;
        positive("wavelength", self.wavelength)?;
        positive("distance", self.distance)?;
        positive("saturation_current", self.saturation_current)?;
        positive("ideality", self.ideality)?;
        positive("thermal_voltage", self.thermal_voltage)?;
        positive("antenna_impedance", self.antenna_impedance)?;
        positive("bandwidth", self.bandwidth)?;
        positive("temperature", self.temperature)?;
        positive("lna_gain", self.lna_gain)?;
        if !(self.rec_noise_ratio.is_finite() && self.rec_noise_ratio >= 0.0) {
            return Err(Error::param("rec_noise_ratio", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// Friis free-space received power (W).
    pub fn received_power(&self) -> f64 {
        let free_space = self.wavelength / (4.0 * PI * self.distance);
        self.transmit_power * self.tx_gain * self.rx_gain * free_space * free_space
    }

    /// Antenna thermal noise power `k0 T B` (W).
    pub fn thermal_noise_power(&self) -> f64 {
        BOLTZMANN * self.temperature * self.bandwidth
    }

    /// Rectifier noise power (W).
    pub fn rec_noise_power(&self) -> f64 {
        self.rec_noise_ratio * self.thermal_noise_power()
    }

    /// Mean of the squared amplified input amplitude, `G_LNA * P_r`.
    pub fn input_mean(&self) -> f64 {
        self.lna_gain * self.received_power()
    }

    pub fn diode_coefficients(&self, order: TaylorOrder) -> DiodeCoeffs {
        let nvt = self.ideality * self.thermal_voltage;
        let r = self.antenna_impedance;
        let i_s = self.saturation_current;
        // i_s R^{i/2} / (i! (n v_t)^i) for i = 2, 4
        let k2 = i_s * r / (2.0 * nvt * nvt);
        let k4 = i_s * r * r / (24.0 * nvt * nvt * nvt * nvt);
        DiodeCoeffs { k2, k4, order }
    }
}

/// Thermal noise power for an explicit temperature and bandwidth.
pub fn thermal_noise(temperature: f64, bandwidth: f64) -> Result<f64> {
    positive("temperature", temperature)?;
    positive("bandwidth", bandwidth)?;
    Ok(BOLTZMANN * temperature * bandwidth)
}

/// Truncation order of the diode Taylor expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaylorOrder {
    SecondOnly,
    Fourth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodeCoeffs {
    pub k2: f64,
    pub k4: f64,
    pub order: TaylorOrder,
}

impl DiodeCoeffs {
    /// The quartic coefficient as seen by the channel: zero for
    /// [`TaylorOrder::SecondOnly`].
    pub fn effective_k4(&self) -> f64 {
        match self.order {
            TaylorOrder::SecondOnly => 0.0,
            TaylorOrder::Fourth => self.k4,
        }
    }
}
