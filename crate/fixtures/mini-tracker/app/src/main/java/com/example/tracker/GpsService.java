package com.example.tracker;

import android.app.Service;
import android.content.Intent;
import android.os.IBinder;

import com.example.tracker.data.TrackDatabase;

public class GpsService extends Service {
    private TrackDatabase db;

    @Override
    public void onCreate() {
        super.onCreate();
        db = new TrackDatabase(this);
    }

    @Override
    public int onStartCommand(Intent intent, int flags, int startId) {
        db.begin(System.currentTimeMillis());
        new UploadTask(db).execute();
        return START_STICKY;
    }

    @Override
    public IBinder onBind(Intent intent) {
        return null;
    }
}
