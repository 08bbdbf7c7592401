use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Button {
    Left,
    Right,
}

impl Button {
    pub fn index(self) -> usize {
        match self {
            Button::Left => 0,
            Button::Right => 1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Button::Left => "L",
            Button::Right => "R",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Enabled,
    Disabled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    CursorMove { x: u32, y: u32 },
    ButtonDown(Button),
    ButtonUp(Button),
    ModeChange(Mode),
}

/// Driver output. Serialized as one flat JSON object per event:
/// `{"t":..,"kind":"move|down|up|mode","x":..,"y":..,"btn":"L|R","mode":"on|off"}`
/// with only the fields relevant to `kind` present.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputEvent {
    pub t: f64,
    pub kind: EventKind,
}

#[derive(Serialize, Deserialize)]
struct EventRecord<'a> {
    t: f64,
    kind: &'a str,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    btn: Option<&'a str>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<&'a str>,
}

impl Serialize for OutputEvent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut rec = EventRecord {
            t: self.t,
            kind: "",
            x: None,
            y: None,
            btn: None,
            mode: None,
        };
        match self.kind {
            EventKind::CursorMove { x, y } => {
                rec.kind = "move";
                rec.x = Some(x);
                rec.y = Some(y);
            }
            EventKind::ButtonDown(b) => {
                rec.kind = "down";
                rec.btn = Some(b.label());
            }
            EventKind::ButtonUp(b) => {
                rec.kind = "up";
                rec.btn = Some(b.label());
            }
            EventKind::ModeChange(m) => {
                rec.kind = "mode";
                rec.mode = Some(match m {
                    Mode::Enabled => "on",
                    Mode::Disabled => "off",
                });
            }
        }
        rec.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OutputEvent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rec = EventRecord::deserialize(deserializer)?;
        let button = |b: Option<&str>| match b {
            Some("L") => Ok(Button::Left),
            Some("R") => Ok(Button::Right),
            other => Err(D::Error::custom(format!("bad btn {other:?}"))),
        };
        let kind = match rec.kind {
            "move" => match (rec.x, rec.y) {
                (Some(x), Some(y)) => EventKind::CursorMove { x, y },
                _ => return Err(D::Error::custom("move event needs x and y")),
            },
            "down" => EventKind::ButtonDown(button(rec.btn)?),
            "up" => EventKind::ButtonUp(button(rec.btn)?),
            "mode" => EventKind::ModeChange(match rec.mode {
                Some("on") => Mode::Enabled,
                Some("off") => Mode::Disabled,
                other => return Err(D::Error::custom(format!("bad mode {other:?}"))),
            }),
            other => return Err(D::Error::custom(format!("unknown event kind {other:?}"))),
        };
        Ok(OutputEvent { t: rec.t, kind })
    }
}
