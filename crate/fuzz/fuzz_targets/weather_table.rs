#![no_main]

use libfuzzer_sys::fuzz_target;
use lmui_core::apps::{OfflineWeather, WeatherSource};

fuzz_target!(|data: (&str, &str)| {
    let (table, city) = data;
    if let Ok(weather) = OfflineWeather::from_json(table) {
        let _ = weather.lookup(city);
    }
});
